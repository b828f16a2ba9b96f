#include "ceopt/ce_core.hpp"

#include "ceopt/errors.hpp"
#include "ceopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ceopt {

void CeSettings::validate() const
{
    if (elite_count < 1 || elite_count > population_size)
        throw ParameterError("elite_count must satisfy 1 <= p <= population_size");
    if (!(smoothing_alpha > 0.0) || smoothing_alpha > 1.0)
        throw ParameterError("smoothing_alpha must be in (0, 1]");
    if (!(epsilon > 0.0))
        throw ParameterError("epsilon must be positive");
}

double GaussianPopulationModel::max_stddev() const
{
    double m = 0.0;
    for (double s : stddevs)
        m = std::max(m, s);
    return m;
}

void GaussianPopulationModel::validate() const
{
    if (means.size() != stddevs.size())
        throw DimensionError("means and stddevs must have equal length");
    if (means.empty())
        throw DimensionError("model must have at least one component");
    for (double s : stddevs)
        if (!(s >= 0.0))
            throw ParameterError("stddevs must be nonnegative");
}

std::vector<std::vector<double>> sample_population(const GaussianPopulationModel& model,
                                                   std::size_t n, std::mt19937_64& rng)
{
    model.validate();
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> out(n);
    const std::size_t dim = model.dimension();
    for (auto& sample : out) {
        sample.resize(dim);
        for (std::size_t i = 0; i < dim; ++i)
            sample[i] = model.means[i] + model.stddevs[i] * unit(rng);
    }
    return out;
}

std::pair<std::vector<std::size_t>, double> elite_select(std::span<const double> scores,
                                                         std::size_t p)
{
    if (scores.empty() || p == 0 || p > scores.size())
        throw ParameterError("elite count must satisfy 1 <= p <= number of scores");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // stable sort keeps the lowest-index winner among ties
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    order.resize(p);
    return {order, scores[order[p - 1]]};
}

GaussianPopulationModel update_gaussian(const std::vector<std::vector<double>>& elites)
{
    if (elites.empty())
        throw ParameterError("elite set must be non-empty");
    const std::size_t dim = elites.front().size();
    for (const auto& e : elites)
        if (e.size() != dim)
            throw DimensionError("elite samples must have uniform dimension");

    GaussianPopulationModel out;
    out.means.assign(dim, 0.0);
    out.stddevs.assign(dim, 0.0);
    const double inv = 1.0 / static_cast<double>(elites.size());
    for (const auto& e : elites)
        for (std::size_t i = 0; i < dim; ++i)
            out.means[i] += e[i];
    for (std::size_t i = 0; i < dim; ++i)
        out.means[i] *= inv;
    for (const auto& e : elites)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = e[i] - out.means[i];
            out.stddevs[i] += d * d;
        }
    for (std::size_t i = 0; i < dim; ++i)
        out.stddevs[i] = std::sqrt(out.stddevs[i] * inv);
    return out;
}

GaussianPopulationModel smooth(const GaussianPopulationModel& next,
                               const GaussianPopulationModel& prev, double alpha)
{
    if (next.dimension() != prev.dimension())
        throw DimensionError("smooth: model dimensions differ");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ParameterError("smooth: alpha must be in (0, 1]");
    GaussianPopulationModel out;
    const std::size_t dim = next.dimension();
    out.means.resize(dim);
    out.stddevs.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out.means[i] = alpha * next.means[i] + (1.0 - alpha) * prev.means[i];
        out.stddevs[i] = alpha * next.stddevs[i] + (1.0 - alpha) * prev.stddevs[i];
    }
    return out;
}

bool variance_stop(const GaussianPopulationModel& model, double epsilon)
{
    return model.max_stddev() < epsilon;
}

namespace {

double windowed_relative_variance(std::span<const double> g, std::size_t t, std::size_t k)
{
    double mean = 0.0;
    for (std::size_t s = t + 1 - k; s <= t; ++s)
        mean += g[s];
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (std::size_t s = t + 1 - k; s <= t; ++s)
        var += (g[s] - mean) * (g[s] - mean);
    var /= static_cast<double>(k - 1);
    if (mean == 0.0)
        return var == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return var / (mean * mean);
}

} // namespace

std::optional<std::size_t> moving_average_stop(const StopHistory& history, double epsilon)
{
    const std::size_t k = history.window;
    const std::size_t r = history.lookahead;
    if (k < 2 || r < 1)
        throw ParameterError("moving_average_stop requires window >= 2, lookahead >= 1");
    const auto& g = history.gamma_history;
    if (g.size() < k + r)
        return std::nullopt;
    for (std::size_t t = k - 1; t + r < g.size(); ++t) {
        double cmin = std::numeric_limits<double>::infinity();
        double cmax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= r; ++j) {
            const double c = windowed_relative_variance(g, t + j, k);
            cmin = std::min(cmin, c);
            cmax = std::max(cmax, c);
        }
        const double ratio = cmax == 0.0 ? 0.0 : (cmax - cmin) / cmax;
        if (ratio <= epsilon)
            return t;
    }
    return std::nullopt;
}

CeResult ce_minimize(const std::function<double(std::span<const double>)>& objective,
                     GaussianPopulationModel init, const CeSettings& settings,
                     StopRule rule, std::size_t ma_window, std::size_t ma_lookahead,
                     unsigned threads)
{
    settings.validate();
    init.validate();

    GaussianPopulationModel model = std::move(init);
    std::mt19937_64 rng(settings.rng_seed);
    CeResult result;
    StopHistory history{{}, ma_window, ma_lookahead};

    for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
        auto population = sample_population(model, settings.population_size, rng);
        std::vector<double> scores(population.size());
        std::vector<std::size_t> bad(population.size(), 0);
        parallel_for(population.size(), threads, [&](std::size_t m) {
            const double s = objective(population[m]);
            scores[m] = s;
            if (!std::isfinite(s))
                bad[m] = 1;
        });
        for (std::size_t m = 0; m < bad.size(); ++m)
            if (bad[m])
                throw EvaluationError("objective returned a non-finite value for sample " +
                                      std::to_string(m) + " in iteration " + std::to_string(it));

        auto [elite_idx, gamma_hat] = elite_select(scores, settings.elite_count);
        std::vector<std::vector<double>> elites;
        elites.reserve(elite_idx.size());
        for (std::size_t m : elite_idx)
            elites.push_back(population[m]);

        model = smooth(update_gaussian(elites), model, settings.smoothing_alpha);
        result.log.push_back({it, gamma_hat, scores[elite_idx.front()], model.max_stddev()});

        if (rule == StopRule::VarianceCollapse) {
            if (variance_stop(model, settings.epsilon))
                break;
        } else {
            history.gamma_history.push_back(gamma_hat);
            if (moving_average_stop(history, settings.epsilon))
                break;
        }
    }

    result.best = model.means;
    result.best_cost = objective(result.best);
    return result;
}

} // namespace ceopt
