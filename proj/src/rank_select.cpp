#include "ceopt/rank_select.hpp"

#include "ceopt/errors.hpp"
#include "ceopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ceopt::rank {

void ThresholdStrategy::validate() const
{
    const std::size_t n = num_items;
    const std::size_t k = num_picks;
    if (k == 0 || k > n)
        throw InputError("strategy needs 1 <= k <= N");
    if (rows.size() != k)
        throw InputError("strategy must have one row per remaining-pick count");
    for (std::size_t r = 1; r <= k; ++r) {
        const auto& row = rows[r - 1];
        if (row.size() != n - k + 1)
            throw InputError("strategy row " + std::to_string(r) + " has wrong length");
        for (std::size_t j = 1; j < row.size(); ++j)
            if (row[j] < row[j - 1])
                throw InputError("strategy row " + std::to_string(r) + " not nondecreasing");
        if (row.back() != static_cast<int>(n))
            throw InputError("strategy row " + std::to_string(r) + " must end at N");
    }
    // cross-row monotonicity on shared positions
    for (std::size_t r = 2; r <= k; ++r) {
        const std::size_t lo = row_start(r - 1);            // k-(r-1)+1
        const std::size_t hi = n - r + 1;                   // last shared position
        for (std::size_t j = lo; j <= hi; ++j)
            if (threshold(r - 1, j) > threshold(r, j))
                throw InputError("strategy rows violate cross-row monotonicity");
    }
}

CategoricalModel CategoricalModel::uniform(std::size_t num_items, std::size_t num_picks)
{
    if (num_picks == 0 || num_picks > num_items)
        throw InputError("categorical model needs 1 <= k <= N");
    CategoricalModel m;
    m.num_items = num_items;
    m.num_picks = num_picks;
    const std::size_t free_positions = num_items - num_picks;
    const double p = 1.0 / static_cast<double>(num_items);
    m.probs.assign(num_picks,
                   std::vector<std::vector<double>>(free_positions,
                                                    std::vector<double>(num_items, p)));
    m.initial_probs = m.probs;
    return m;
}

void CategoricalModel::validate() const
{
    for (const auto& row : probs)
        for (const auto& slice : row) {
            double sum = 0.0;
            for (double p : slice) {
                if (!(p >= 0.0))
                    throw InputError("categorical probabilities must be nonnegative");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw InputError("categorical slice does not sum to 1");
        }
}

std::vector<int> relative_ranks(std::span<const int> permutation)
{
    const std::size_t n = permutation.size();
    std::vector<char> seen(n + 1, 0);
    for (int a : permutation) {
        if (a < 1 || a > static_cast<int>(n) || seen[static_cast<std::size_t>(a)])
            throw InputError("input is not a permutation of 1..N");
        seen[static_cast<std::size_t>(a)] = 1;
    }
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        int count = 0;
        for (std::size_t j = 0; j <= i; ++j)
            if (permutation[j] <= permutation[i])
                ++count;
        y[i] = count;
    }
    return y;
}

SelectionOutcome apply_strategy(const ThresholdStrategy& strategy,
                                std::span<const int> permutation)
{
    strategy.validate();
    if (permutation.size() != strategy.num_items)
        throw InputError("permutation length must equal N");
    const auto y = relative_ranks(permutation);
    const std::size_t n = strategy.num_items;
    const std::size_t k = strategy.num_picks;

    SelectionOutcome out;
    std::size_t prev = 0;
    for (std::size_t m = 1; m <= k; ++m) {
        const std::size_t remaining = k - m + 1;
        const std::size_t lo = std::max(prev + 1, strategy.row_start(remaining));
        const std::size_t hi = n - remaining + 1;
        std::size_t fired = hi; // forced pick if the rule never triggers
        for (std::size_t j = lo; j <= hi; ++j) {
            if (y[j - 1] <= strategy.threshold(remaining, j)) {
                fired = j;
                break;
            }
        }
        out.positions.push_back(fired);
        out.rank_sum += permutation[fired - 1];
        prev = fired;
    }
    return out;
}

double estimate_rank_sum(const ThresholdStrategy& strategy, std::size_t replications,
                         std::mt19937_64& rng)
{
    if (replications < 1)
        throw ParameterError("estimate_rank_sum needs at least one replication");
    std::vector<int> perm(strategy.num_items);
    std::iota(perm.begin(), perm.end(), 1);
    double total = 0.0;
    for (std::size_t rep = 0; rep < replications; ++rep) {
        std::shuffle(perm.begin(), perm.end(), rng);
        total += apply_strategy(strategy, perm).rank_sum;
    }
    return total / static_cast<double>(replications);
}

double exact_value(const ThresholdStrategy& strategy)
{
    if (strategy.num_items > 8)
        throw SizeError("exact_value enumerates N! permutations; N <= 8 required");
    std::vector<int> perm(strategy.num_items);
    std::iota(perm.begin(), perm.end(), 1);
    double total = 0.0;
    std::size_t count = 0;
    do {
        total += apply_strategy(strategy, perm).rank_sum;
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / static_cast<double>(count);
}

namespace {

using RawSample = std::vector<std::vector<int>>; // [row][sampled position] -> value

RawSample sample_raw(const CategoricalModel& model, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RawSample x(model.probs.size());
    for (std::size_t i = 0; i < model.probs.size(); ++i) {
        x[i].resize(model.probs[i].size());
        for (std::size_t j = 0; j < model.probs[i].size(); ++j) {
            const auto& slice = model.probs[i][j];
            const double total = std::accumulate(slice.begin(), slice.end(), 0.0);
            if (!(total > 0.0))
                throw ModelCollapseError("categorical slice (" + std::to_string(i + 1) + "," +
                                         std::to_string(j + 1) + ") has no mass");
            double target = unit(rng) * total;
            std::size_t l = 0;
            for (; l + 1 < slice.size(); ++l) {
                target -= slice[l];
                if (target < 0.0)
                    break;
            }
            x[i][j] = static_cast<int>(l);
        }
    }
    return x;
}

/// Projects raw sampled thresholds onto the feasible cone: pins the final
/// entry of each row to N, takes the cumulative maximum within each row,
/// and raises rows with more remaining picks to dominate rows with fewer
/// on shared positions.
ThresholdStrategy repair(const RawSample& raw, std::size_t num_items, std::size_t num_picks)
{
    ThresholdStrategy s;
    s.num_items = num_items;
    s.num_picks = num_picks;
    s.rows.resize(num_picks);
    for (std::size_t i = 0; i < num_picks; ++i) {
        auto& row = s.rows[i];
        row = raw[i];
        row.push_back(static_cast<int>(num_items));
        for (std::size_t j = 1; j + 1 < row.size(); ++j)
            row[j] = std::max(row[j], row[j - 1]);
    }
    for (std::size_t r = 2; r <= num_picks; ++r) {
        // shared 1-based positions with the row below: k-r+2 .. N-r+1
        const std::size_t lo = num_picks - r + 2;
        const std::size_t hi = num_items - r + 1;
        for (std::size_t j = lo; j <= hi; ++j) {
            const std::size_t idx = j - s.row_start(r);
            const std::size_t idx_below = j - s.row_start(r - 1);
            s.rows[r - 1][idx] = std::max(s.rows[r - 1][idx], s.rows[r - 2][idx_below]);
        }
        auto& row = s.rows[r - 1];
        for (std::size_t j = 1; j + 1 < row.size(); ++j)
            row[j] = std::max(row[j], row[j - 1]);
    }
    return s;
}

ThresholdStrategy modal_strategy(const CategoricalModel& model)
{
    RawSample raw(model.probs.size());
    for (std::size_t i = 0; i < model.probs.size(); ++i) {
        raw[i].resize(model.probs[i].size());
        for (std::size_t j = 0; j < model.probs[i].size(); ++j) {
            const auto& slice = model.probs[i][j];
            raw[i][j] = static_cast<int>(std::max_element(slice.begin(), slice.end()) -
                                         slice.begin());
        }
    }
    return repair(raw, model.num_items, model.num_picks);
}

/// Largest per-slice distance from a point mass; 0 once every slice has
/// collapsed onto one value. Plays the role of max sigma in the log.
double dispersion(const CategoricalModel& model)
{
    double worst = 0.0;
    for (const auto& row : model.probs)
        for (const auto& slice : row)
            worst = std::max(worst, 1.0 - *std::max_element(slice.begin(), slice.end()));
    return worst;
}

} // namespace

RankResult ce_rank_optimize(std::size_t num_items, std::size_t num_picks,
                            const CeSettings& settings, const RankCeOptions& options,
                            unsigned threads)
{
    if (num_picks == 0 || num_picks > num_items)
        throw ParameterError("ce_rank_optimize needs 1 <= k <= N");
    if (!(options.elite_fraction > 0.0) || options.elite_fraction > 1.0)
        throw ParameterError("elite_fraction must be in (0, 1]");
    if (options.sample_size < 1 || options.score_replications < 1)
        throw ParameterError("sample_size and score_replications must be positive");

    CategoricalModel model = CategoricalModel::uniform(num_items, num_picks);
    std::mt19937_64 rng(settings.rng_seed);
    const std::size_t n2 = options.sample_size;
    const std::size_t elite_count = static_cast<std::size_t>(
        std::ceil(options.elite_fraction * static_cast<double>(n2)));

    RankResult result;
    StopHistory history{{}, options.window, options.lookahead};

    for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
        std::vector<RawSample> raw(n2);
        std::vector<ThresholdStrategy> strategies(n2);
        for (std::size_t n = 0; n < n2; ++n) {
            raw[n] = sample_raw(model, rng);
            strategies[n] = repair(raw[n], num_items, num_picks);
        }
        std::vector<double> scores(n2);
        parallel_for(n2, threads, [&](std::size_t n) {
            std::mt19937_64 sub(derive_seed(settings.rng_seed, it, n));
            scores[n] = estimate_rank_sum(strategies[n], options.score_replications, sub);
        });

        auto [elite_idx, gamma_hat] = elite_select(scores, elite_count);

        // weighted elite-frequency update, slice by slice
        auto updated = model.probs;
        for (std::size_t i = 0; i < model.probs.size(); ++i) {
            for (std::size_t j = 0; j < model.probs[i].size(); ++j) {
                std::vector<double> mass(num_items, 0.0);
                double total = 0.0;
                for (std::size_t n = 0; n < n2; ++n) {
                    if (scores[n] > gamma_hat)
                        continue;
                    const int l = raw[n][i][j];
                    const double w = model.initial_probs[i][j][static_cast<std::size_t>(l)] /
                                     model.probs[i][j][static_cast<std::size_t>(l)];
                    mass[static_cast<std::size_t>(l)] += w;
                    total += w;
                }
                if (!(total > 0.0))
                    throw ModelCollapseError("rank CE slice (" + std::to_string(i + 1) + "," +
                                             std::to_string(j + 1) + ") lost all elite mass");
                for (std::size_t l = 0; l < num_items; ++l)
                    updated[i][j][l] = mass[l] / total;
            }
        }
        for (std::size_t i = 0; i < model.probs.size(); ++i)
            for (std::size_t j = 0; j < model.probs[i].size(); ++j)
                for (std::size_t l = 0; l < num_items; ++l)
                    model.probs[i][j][l] = settings.smoothing_alpha * updated[i][j][l] +
                                           (1.0 - settings.smoothing_alpha) * model.probs[i][j][l];

        result.log.push_back({it, gamma_hat, scores[elite_idx.front()], dispersion(model)});
        history.gamma_history.push_back(gamma_hat);
        if (moving_average_stop(history, settings.epsilon))
            break;
    }

    result.strategy = modal_strategy(model);
    std::mt19937_64 final_rng(derive_seed(settings.rng_seed, 0xfffful));
    result.estimated_value =
        estimate_rank_sum(result.strategy, options.score_replications, final_rng);
    return result;
}

} // namespace ceopt::rank
