#include "ceopt/svrp.hpp"

#include "ceopt/errors.hpp"
#include "ceopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ceopt::svrp {

void RoutingInstance::validate() const
{
    const std::size_t nodes = customers + 1;
    if (customers == 0)
        throw ParameterError("instance needs at least one customer");
    if (distance.size() != nodes)
        throw DimensionError("distance matrix must be (n+1) x (n+1)");
    for (std::size_t i = 0; i < nodes; ++i) {
        if (distance[i].size() != nodes)
            throw DimensionError("distance matrix must be (n+1) x (n+1)");
        if (distance[i][i] != 0.0)
            throw ParameterError("distance matrix diagonal must be zero");
        for (double d : distance[i])
            if (!(d >= 0.0))
                throw ParameterError("distances must be nonnegative");
    }
    if (!(capacity > 0.0))
        throw ParameterError("capacity must be positive");
    if (demand_mean.size() != customers || demand_stddev.size() != customers ||
        penalty.size() != customers)
        throw DimensionError("per-customer vectors must have length n");
    for (std::size_t i = 0; i < customers; ++i)
        if (!(demand_stddev[i] >= 0.0) || !(penalty[i] >= 0.0))
            throw ParameterError("demand stddevs and penalties must be nonnegative");
}

TransitionModel TransitionModel::uniform(std::size_t customers)
{
    TransitionModel m;
    const std::size_t nodes = customers + 1;
    m.probs.assign(nodes, std::vector<double>(nodes, 0.0));
    for (std::size_t i = 0; i < nodes; ++i) {
        // destinations are customers only; the return arc is implicit
        const double p = 1.0 / static_cast<double>(i == 0 ? customers : customers - 1);
        for (std::size_t j = 1; j < nodes; ++j)
            if (j != i)
                m.probs[i][j] = p;
    }
    return m;
}

void TransitionModel::validate() const
{
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i].size() != probs.size())
            throw DimensionError("transition matrix must be square");
        if (probs[i][i] != 0.0)
            throw ParameterError("transition matrix diagonal must be zero");
        double sum = 0.0;
        for (double p : probs[i]) {
            if (!(p >= 0.0))
                throw ParameterError("transition probabilities must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ParameterError("transition matrix row " + std::to_string(i) +
                                 " does not sum to 1");
    }
}

double route_cost(const Route& route, std::span<const double> demands,
                  const RoutingInstance& instance)
{
    if (route.size() != instance.customers || demands.size() != instance.customers)
        throw DimensionError("route and demands must cover every customer");
    double stock = instance.capacity;
    double cost = 0.0;
    std::size_t at = 0;
    for (std::size_t leg = 0; leg < route.size(); ++leg) {
        const std::size_t c = route[leg];
        cost += instance.distance[at][c];
        const double demand = demands[c - 1];
        if (demand > stock) {
            // failure: partial delivery, return to depot, penalize this
            // customer and everyone not yet visited
            cost += instance.distance[c][0];
            cost += instance.penalty[c - 1];
            for (std::size_t rest = leg + 1; rest < route.size(); ++rest)
                cost += instance.penalty[route[rest] - 1];
            return cost;
        }
        stock -= demand;
        at = c;
    }
    return cost + instance.distance[at][0];
}

namespace {

double draw_demand(double mean, double stddev, std::mt19937_64& rng)
{
    if (stddev == 0.0)
        return mean;
    std::normal_distribution<double> dist(mean, stddev);
    double d = dist(rng);
    while (d < 0.0)
        d = dist(rng); // truncate at zero by resampling
    return d;
}

std::vector<double> draw_demands(const RoutingInstance& instance, std::mt19937_64& rng)
{
    std::vector<double> d(instance.customers);
    for (std::size_t i = 0; i < instance.customers; ++i)
        d[i] = draw_demand(instance.demand_mean[i], instance.demand_stddev[i], rng);
    return d;
}

} // namespace

CostEstimate estimate_expected_cost(const Route& route, const RoutingInstance& instance,
                                    std::size_t replications, std::mt19937_64& rng)
{
    if (replications < 2)
        throw ParameterError("estimate_expected_cost needs at least two replications");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t rep = 0; rep < replications; ++rep) {
        const auto demands = draw_demands(instance, rng);
        const double h = route_cost(route, demands, instance);
        sum += h;
        sum_sq += h * h;
    }
    const double m = static_cast<double>(replications);
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
    return {mean, std::sqrt(var / m)};
}

Route sample_route(const TransitionModel& model, std::mt19937_64& rng)
{
    const std::size_t nodes = model.probs.size();
    const std::size_t n = nodes - 1;
    std::vector<char> visited(nodes, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Route route;
    route.reserve(n);
    std::size_t at = 0;
    for (std::size_t step = 0; step < n; ++step) {
        const auto& row = model.probs[at];
        double mass = 0.0;
        for (std::size_t j = 1; j < nodes; ++j)
            if (!visited[j])
                mass += row[j];
        if (!(mass > 0.0))
            throw ModelCollapseError("transition row " + std::to_string(at) +
                                     " has no mass on unvisited customers");
        double target = unit(rng) * mass;
        std::size_t pick = 0;
        for (std::size_t j = 1; j < nodes; ++j) {
            if (visited[j])
                continue;
            target -= row[j];
            pick = j;
            if (target < 0.0)
                break;
        }
        visited[pick] = 1;
        route.push_back(pick);
        at = pick;
    }
    return route;
}

SvrpResult ce_route_optimize(const RoutingInstance& instance, const CeSettings& settings,
                             const SvrpCeOptions& options, unsigned threads)
{
    instance.validate();
    settings.validate();
    if (instance.customers < 2)
        throw ParameterError("route optimization needs at least two customers");

    TransitionModel model = TransitionModel::uniform(instance.customers);
    std::mt19937_64 rng(settings.rng_seed);
    const std::size_t nodes = instance.customers + 1;

    SvrpResult result;
    StopHistory history{{}, options.window, options.lookahead};
    Route best_route;
    double best_score = std::numeric_limits<double>::infinity();

    for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
        std::vector<Route> routes(settings.population_size);
        for (auto& r : routes)
            r = sample_route(model, rng);
        std::vector<double> scores(routes.size());
        parallel_for(routes.size(), threads, [&](std::size_t m) {
            std::mt19937_64 sub(derive_seed(settings.rng_seed, it, m));
            scores[m] = estimate_expected_cost(routes[m], instance,
                                               options.cost_replications, sub).mean;
        });

        auto [elite_idx, gamma_hat] = elite_select(scores, settings.elite_count);
        if (scores[elite_idx.front()] < best_score) {
            best_score = scores[elite_idx.front()];
            best_route = routes[elite_idx.front()];
        }

        // refit: smoothed elite arc frequencies with a floor on feasible arcs
        std::vector<std::vector<double>> freq(nodes, std::vector<double>(nodes, 0.0));
        for (std::size_t m : elite_idx) {
            std::size_t at = 0;
            for (std::size_t c : routes[m]) {
                freq[at][c] += 1.0;
                at = c;
            }
        }
        for (std::size_t i = 0; i < nodes; ++i) {
            auto& row = model.probs[i];
            const double total = std::accumulate(freq[i].begin(), freq[i].end(), 0.0);
            double row_sum = 0.0;
            for (std::size_t j = 1; j < nodes; ++j) {
                if (j == i)
                    continue;
                const double target = total > 0.0 ? freq[i][j] / total : row[j];
                row[j] = settings.smoothing_alpha * target +
                         (1.0 - settings.smoothing_alpha) * row[j] + options.arc_floor;
                row_sum += row[j];
            }
            for (std::size_t j = 1; j < nodes; ++j)
                if (j != i)
                    row[j] /= row_sum;
        }

        double dispersion = 0.0;
        for (std::size_t i = 0; i < nodes; ++i)
            dispersion = std::max(dispersion,
                                  1.0 - *std::max_element(model.probs[i].begin(),
                                                          model.probs[i].end()));
        result.log.push_back({it, gamma_hat, scores[elite_idx.front()], dispersion});

        history.gamma_history.push_back(gamma_hat);
        if (moving_average_stop(history, settings.epsilon))
            break;
    }

    result.route = best_route;
    std::mt19937_64 final_rng(derive_seed(settings.rng_seed, 0xfffful));
    result.cost = estimate_expected_cost(best_route, instance,
                                         std::max<std::size_t>(options.cost_replications, 2),
                                         final_rng);
    return result;
}

std::pair<Route, std::vector<OracleEntry>> exhaustive_oracle(const RoutingInstance& instance,
                                                             std::size_t replications,
                                                             std::mt19937_64& rng)
{
    instance.validate();
    if (instance.customers > 8)
        throw SizeError("exhaustive_oracle enumerates n! routes; n <= 8 required");
    if (replications < 2)
        throw ParameterError("exhaustive_oracle needs at least two replications");

    // common random numbers: one demand table shared by every route
    std::vector<std::vector<double>> demand_draws(replications);
    for (auto& d : demand_draws)
        d = draw_demands(instance, rng);

    Route route(instance.customers);
    std::iota(route.begin(), route.end(), std::size_t{1});

    std::vector<OracleEntry> table;
    Route best;
    double best_mean = std::numeric_limits<double>::infinity();
    do {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& demands : demand_draws) {
            const double h = route_cost(route, demands, instance);
            sum += h;
            sum_sq += h * h;
        }
        const double m = static_cast<double>(replications);
        const double mean = sum / m;
        const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
        table.push_back({route, {mean, std::sqrt(var / m)}});
        if (mean < best_mean) {
            best_mean = mean;
            best = route;
        }
    } while (std::next_permutation(route.begin(), route.end()));
    return {best, table};
}

} // namespace ceopt::svrp
