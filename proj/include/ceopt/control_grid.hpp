#ifndef CEOPT_CONTROL_GRID_HPP
#define CEOPT_CONTROL_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ceopt {

/// Node times of a piecewise-linear control plus its box constraints.
struct ControlGrid {
    std::vector<double> nodes; // strictly increasing, spans the horizon
    double lower = 0.0;
    double upper = 0.9;

    std::size_t node_count() const { return nodes.size(); }
    double start() const { return nodes.front(); }
    double end() const { return nodes.back(); }
    void validate() const; // throws ParameterError

    static ControlGrid uniform(double t1, double t2, std::size_t intervals,
                               double lower, double upper);
};

/// Tent function of node i: 1 at node i, linear to 0 at the neighbours,
/// 0 elsewhere. Boundary nodes use only their interior half.
/// Throws DomainError for t outside the horizon.
double hat_basis(std::size_t i, double t, const ControlGrid& grid);

/// Piecewise-linear interpolation of the node values, clamped to the
/// grid bounds: clamp(sum_i c_i * hat_i(t), lower, upper).
double eval_control(std::span<const double> c, double t, const ControlGrid& grid);

} // namespace ceopt

#endif
