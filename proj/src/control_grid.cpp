#include "ceopt/control_grid.hpp"

#include "ceopt/errors.hpp"

#include <algorithm>
#include <string>

namespace ceopt {

void ControlGrid::validate() const
{
    if (nodes.size() < 2)
        throw ParameterError("control grid needs at least two nodes");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw ParameterError("control grid nodes must be strictly increasing");
    if (!(lower >= 0.0) || !(upper >= lower))
        throw ParameterError("control bounds must satisfy 0 <= lower <= upper");
}

ControlGrid ControlGrid::uniform(double t1, double t2, std::size_t intervals,
                                 double lower, double upper)
{
    ControlGrid g;
    g.lower = lower;
    g.upper = upper;
    g.nodes.resize(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        g.nodes[i] = t1 + (t2 - t1) * static_cast<double>(i) / static_cast<double>(intervals);
    g.nodes.back() = t2;
    g.validate();
    return g;
}

namespace {

void check_horizon(double t, const ControlGrid& grid)
{
    if (t < grid.start() || t > grid.end())
        throw DomainError("time " + std::to_string(t) + " outside control horizon");
}

} // namespace

double hat_basis(std::size_t i, double t, const ControlGrid& grid)
{
    check_horizon(t, grid);
    if (i >= grid.node_count())
        throw DomainError("hat_basis: node index out of range");
    const auto& x = grid.nodes;
    if (i > 0 && t >= x[i - 1] && t <= x[i])
        return (t - x[i - 1]) / (x[i] - x[i - 1]);
    if (i + 1 < x.size() && t >= x[i] && t <= x[i + 1])
        return (x[i + 1] - t) / (x[i + 1] - x[i]);
    return t == x[i] ? 1.0 : 0.0;
}

double eval_control(std::span<const double> c, double t, const ControlGrid& grid)
{
    check_horizon(t, grid);
    if (c.size() != grid.node_count())
        throw DimensionError("control vector length must match grid node count");
    const auto& x = grid.nodes;
    // segment containing t; upper_bound keeps node hits on the left segment
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t hi = it == x.end() ? x.size() - 1
                                   : static_cast<std::size_t>(it - x.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - x[lo]) / (x[hi] - x[lo]);
    const double raw = c[lo] + w * (c[hi] - c[lo]);
    return std::clamp(raw, grid.lower, grid.upper);
}

} // namespace ceopt
