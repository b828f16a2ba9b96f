#ifndef CEOPT_SVRP_HPP
#define CEOPT_SVRP_HPP

#include "ceopt/ce_core.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace ceopt::svrp {

/// Single-vehicle stochastic routing instance. Node 0 is the depot;
/// customers are 1..n. Demands are independent normals truncated at 0.
struct RoutingInstance {
    std::size_t customers = 0;                     // n
    std::vector<std::vector<double>> distance;     // (n+1) x (n+1)
    double capacity = 0.0;                         // Q
    std::vector<double> demand_mean;               // per customer
    std::vector<double> demand_stddev;
    std::vector<double> penalty;

    void validate() const; // throws ParameterError / DimensionError
};

/// Visiting order: a permutation of customers 1..n.
using Route = std::vector<std::size_t>;

/// Row-stochastic next-node probabilities, depot row included.
struct TransitionModel {
    std::vector<std::vector<double>> probs; // (n+1) x (n+1), zero diagonal

    static TransitionModel uniform(std::size_t customers);
    void validate() const;
};

/// Deterministic cost of one demand realization. The vehicle departs
/// with stock Q and delivers along the route; on the first customer whose
/// demand exceeds the remaining stock it returns to the depot and the
/// route terminates, paying that customer's penalty plus the penalties of
/// everyone not yet visited. Exact depletion is a success.
double route_cost(const Route& route, std::span<const double> demands,
                  const RoutingInstance& instance);

struct CostEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of G(r) = E[H(r, D)] over `replications` demand
/// draws; returns the sample mean and its standard error.
CostEstimate estimate_expected_cost(const Route& route, const RoutingInstance& instance,
                                    std::size_t replications, std::mt19937_64& rng);

/// Samples a route node by node: from the current row, restricted to
/// unvisited customers and renormalized.
Route sample_route(const TransitionModel& model, std::mt19937_64& rng);

struct SvrpResult {
    Route route;
    CostEstimate cost;
    std::vector<IterationRecord> log;
};

struct SvrpCeOptions {
    std::size_t cost_replications = 200; // M: demand draws per route score
    std::size_t window = 5;              // K
    std::size_t lookahead = 3;           // R
    double arc_floor = 1e-6;             // added to feasible arcs before renormalizing
};

/// CE over routes through the transition model: sample, score, elite
/// select, refit the model to smoothed elite arc frequencies. Stops by
/// the moving-average rule (settings.epsilon) or max_iterations; returns
/// the best route observed, re-estimated on a fresh stream.
SvrpResult ce_route_optimize(const RoutingInstance& instance, const CeSettings& settings,
                             const SvrpCeOptions& options = {}, unsigned threads = 1);

struct OracleEntry {
    Route route;
    CostEstimate cost;
};

/// Evaluates every permutation with common random numbers (the same
/// demand draws across routes); n <= 8. Returns the argmin and the full
/// table in lexicographic route order.
std::pair<Route, std::vector<OracleEntry>> exhaustive_oracle(const RoutingInstance& instance,
                                                             std::size_t replications,
                                                             std::mt19937_64& rng);

} // namespace ceopt::svrp

#endif
