#ifndef CEOPT_CE_CORE_HPP
#define CEOPT_CE_CORE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace ceopt {

/// Knobs of the cross-entropy loop.
struct CeSettings {
    std::size_t population_size = 100;
    std::size_t elite_count = 10;
    double smoothing_alpha = 0.7;
    double epsilon = 1e-5;
    std::size_t max_iterations = 500;
    std::uint64_t rng_seed = 0;

    /// Throws ParameterError if 1 <= elite_count <= population_size,
    /// 0 < smoothing_alpha <= 1 or epsilon > 0 is violated.
    void validate() const;
};

/// Independent per-component Gaussians; the sampling distribution for
/// continuous control vectors.
struct GaussianPopulationModel {
    std::vector<double> means;
    std::vector<double> stddevs;

    std::size_t dimension() const { return means.size(); }
    double max_stddev() const;
    void validate() const; // throws DimensionError / ParameterError
};

/// Elite-threshold scores collected per iteration, plus the moving-average
/// stopping-rule parameters.
struct StopHistory {
    std::vector<double> gamma_history;
    std::size_t window = 5;    // K
    std::size_t lookahead = 3; // R
};

/// Draws n vectors, component i ~ Normal(mean_i, stddev_i^2). Draws are
/// serial on the given stream so repeated calls with the same seed are
/// bitwise reproducible.
std::vector<std::vector<double>> sample_population(const GaussianPopulationModel& model,
                                                   std::size_t n, std::mt19937_64& rng);

/// Indices of the p smallest scores (ties broken by lowest index) and the
/// elite threshold gamma_hat = p-th smallest score.
std::pair<std::vector<std::size_t>, double> elite_select(std::span<const double> scores,
                                                         std::size_t p);

/// Refits the Gaussian model to the elite set: component means are the
/// elite sample means, stddevs the population-form (divisor p) deviations.
GaussianPopulationModel update_gaussian(const std::vector<std::vector<double>>& elites);

/// Componentwise alpha*next + (1-alpha)*prev for means and stddevs.
GaussianPopulationModel smooth(const GaussianPopulationModel& next,
                               const GaussianPopulationModel& prev, double alpha);

/// True iff max_i stddev_i < epsilon.
bool variance_stop(const GaussianPopulationModel& model, double epsilon);

/// Moving-average stationarity rule over the gamma history. Computes the
/// window mean B_t, the relative windowed variance C_t = var_t / B_t^2
/// (divisor K-1), and C-/C+ as the min/max of C over the next R offsets.
/// Returns the first t (0-based history index) with
/// (C+ - C-) / C+ <= epsilon, where a zero C+ counts as satisfied.
/// Absent while fewer than window+lookahead entries exist.
std::optional<std::size_t> moving_average_stop(const StopHistory& history, double epsilon);

struct IterationRecord {
    std::size_t iteration; // 1-based
    double gamma_hat;
    double best_score;
    double max_sigma;
};

enum class StopRule {
    VarianceCollapse, // max sigma < epsilon
    MovingAverage,    // stationarity of gamma_hat
};

struct CeResult {
    std::vector<double> best;
    double best_cost;
    std::vector<IterationRecord> log;
};

/// Generic single-distribution CE minimization. The objective must be a
/// pure function; evaluations within an iteration may run on `threads`
/// workers while sampling stays serial, so results do not depend on the
/// worker count. Returns the final mean vector, the objective evaluated
/// at it, and the per-iteration log.
CeResult ce_minimize(const std::function<double(std::span<const double>)>& objective,
                     GaussianPopulationModel init, const CeSettings& settings,
                     StopRule rule = StopRule::VarianceCollapse,
                     std::size_t ma_window = 5, std::size_t ma_lookahead = 3,
                     unsigned threads = 1);

} // namespace ceopt

#endif
