#ifndef CEOPT_EPI_OPT_HPP
#define CEOPT_EPI_OPT_HPP

#include "ceopt/ce_core.hpp"
#include "ceopt/control_grid.hpp"
#include "ceopt/sirc.hpp"

#include <span>
#include <vector>

namespace ceopt::sirc {

/// Weights of the running cost
/// a1*S + a2*I + tau1/2 * u^2 + tau2/2 * v^2.
struct CostWeights {
    double susceptible_weight = 1e-3; // alpha1
    double infected_weight = 0.997;   // alpha2
    double effort_weight_u = 1e-3;    // tau1
    double effort_weight_v = 1e-3;    // tau2

    void validate() const; // throws ParameterError
};

/// Everything that pins down one optimization run: initial state, model
/// coefficients, horizon, control grids and cost weights.
struct Scenario {
    SircState initial;
    SircParameters params;
    double t_start = 0.0;
    double t_end = 1.0;
    double step = 1e-3;
    ControlGrid u_grid;
    ControlGrid v_grid;
    CostWeights weights;

    void validate() const;
};

/// Integrates the controlled system under the interpolated controls.
Trajectory simulate_controlled(std::span<const double> u, std::span<const double> v,
                               const Scenario& scenario);

/// Trapezoidal quadrature of the running cost on the trajectory grid.
double cost_from_trajectory(const Trajectory& traj, const CostWeights& weights);

/// Cost index J(u, v) for node-value control vectors.
double cost_index(std::span<const double> u, std::span<const double> v,
                  const Scenario& scenario);

struct OptimizationResult {
    std::vector<double> u;
    std::vector<double> v;
    double cost = 0.0;
    std::vector<IterationRecord> log;
    double wall_seconds = 0.0;
};

/// Joint CE: one Gaussian model per control, paired samples (m-th u with
/// m-th v), a single elite index set from the joint scores, both models
/// updated and smoothed each iteration. Stops when both variance criteria
/// hold or at max_iterations.
OptimizationResult optimize_joint(const Scenario& scenario, const CeSettings& settings,
                                  unsigned threads = 1);

/// Alternating CE: optimizes u with v fixed at zero, then v with the
/// resulting u fixed; reports the combined pair and its joint cost.
OptimizationResult optimize_alternating(const Scenario& scenario, const CeSettings& settings,
                                        unsigned threads = 1);

/// The two experiment setups: a fresh outbreak ("start") and an already
/// widespread epidemic ("developed"), with the published coefficient set
/// and default horizon/grid choices.
Scenario make_start_scenario();
Scenario make_developed_scenario();

} // namespace ceopt::sirc

#endif
