#ifndef CEOPT_RANK_SELECT_HPP
#define CEOPT_RANK_SELECT_HPP

#include "ceopt/ce_core.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace ceopt::rank {

/// Multiple-stopping threshold rule for picking k of N sequentially
/// arriving objects by relative rank.
///
/// rows[r-1] holds the thresholds used when r picks remain; it covers the
/// 1-based arrival positions j = k-r+1 .. N-r+1 (each row has N-k+1
/// entries) and its final entry is pinned to N so the rule always fires.
struct ThresholdStrategy {
    std::size_t num_items = 0; // N
    std::size_t num_picks = 0; // k
    std::vector<std::vector<int>> rows;

    /// First admissible 1-based position of the row for r remaining picks.
    std::size_t row_start(std::size_t remaining) const { return num_picks - remaining + 1; }
    int threshold(std::size_t remaining, std::size_t position) const
    {
        return rows[remaining - 1][position - row_start(remaining)];
    }
    void validate() const; // throws InputError on shape/monotonicity violations
};

/// Per-(row, position) categorical distributions over threshold values
/// 0..N-1; the pinned final entry of each row is not part of the model.
/// The initial matrix is retained for the importance weights.
struct CategoricalModel {
    std::size_t num_items = 0;
    std::size_t num_picks = 0;
    // probs[i][j][l]: row i (remaining = i+1), j-th sampled position, value l
    std::vector<std::vector<std::vector<double>>> probs;
    std::vector<std::vector<std::vector<double>>> initial_probs;

    static CategoricalModel uniform(std::size_t num_items, std::size_t num_picks);
    void validate() const;
};

/// Y_i = number of j <= i with a_j <= a_i (1-based relative ranks).
/// Throws InputError if the input is not a permutation of 1..N.
std::vector<int> relative_ranks(std::span<const int> permutation);

struct SelectionOutcome {
    std::vector<std::size_t> positions; // 1-based, strictly increasing, k of them
    int rank_sum = 0;
};

/// Applies the stage rules in order (k remaining first). If a rule never
/// fires before positions run out, the pick is forced at the last
/// admissible position, so exactly k objects are always chosen.
SelectionOutcome apply_strategy(const ThresholdStrategy& strategy,
                                std::span<const int> permutation);

/// Monte Carlo mean rank-sum over `replications` uniform permutations.
double estimate_rank_sum(const ThresholdStrategy& strategy, std::size_t replications,
                         std::mt19937_64& rng);

/// Exact expected rank-sum by full permutation enumeration (N <= 8).
double exact_value(const ThresholdStrategy& strategy);

struct RankCeOptions {
    std::size_t score_replications = 200; // N1: permutations per strategy score
    std::size_t sample_size = 500;        // N2: strategies per iteration
    double elite_fraction = 0.1;          // rho
    std::size_t window = 5;               // K
    std::size_t lookahead = 3;            // R
};

struct RankResult {
    ThresholdStrategy strategy;
    double estimated_value = 0.0;
    std::vector<IterationRecord> log;
};

/// Categorical CE over threshold strategies: samples raw threshold
/// matrices, repairs them to the feasible monotone cone for evaluation,
/// scores by Monte Carlo rank-sum, and refits the model with the
/// importance-weighted elite-frequency update followed by smoothing.
/// Stops by the moving-average rule (settings.epsilon) or max_iterations;
/// returns the modal strategy of the final model.
RankResult ce_rank_optimize(std::size_t num_items, std::size_t num_picks,
                            const CeSettings& settings, const RankCeOptions& options = {},
                            unsigned threads = 1);

} // namespace ceopt::rank

#endif
