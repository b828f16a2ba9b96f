#ifndef CEOPT_RK4_HPP
#define CEOPT_RK4_HPP

#include "ceopt/errors.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ceopt {

inline bool state_is_finite(double x) { return std::isfinite(x); }

/// Classical fixed-step RK4. State needs +, scalar *, and a
/// state_is_finite overload. rhs is called as rhs(t, state). A final
/// partial step lands exactly on t2; the returned grid includes both
/// endpoints and the last time is t2 bit-for-bit.
template <class State, class Rhs>
std::pair<std::vector<double>, std::vector<State>> integrate_rk4(const Rhs& rhs,
                                                                 const State& initial,
                                                                 double t1, double t2,
                                                                 double h)
{
    if (!(t2 > t1))
        throw ParameterError("integrate_rk4: t2 must exceed t1");
    if (!(h > 0.0))
        throw ParameterError("integrate_rk4: step must be positive");
    const double span = t2 - t1;
    // tolerate roundoff when h divides the horizon
    const std::size_t full = static_cast<std::size_t>(std::floor(span / h + 1e-9));
    if (full > 100'000'000)
        throw ParameterError("integrate_rk4: grid too large");
    const bool partial = t1 + static_cast<double>(full) * h < t2 - 1e-12 * span;
    const std::size_t n = full + (partial ? 1 : 0);

    std::vector<double> times(n + 1);
    std::vector<State> states;
    states.reserve(n + 1);
    states.push_back(initial);
    times[0] = t1;

    State y = initial;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = times[i];
        const double tn = (i + 1 == n) ? t2 : t1 + static_cast<double>(i + 1) * h;
        const double step = tn - t;
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * step, y + (0.5 * step) * k1);
        const State k3 = rhs(t + 0.5 * step, y + (0.5 * step) * k2);
        const State k4 = rhs(tn, y + step * k3);
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!state_is_finite(y))
            throw DivergenceError("integrate_rk4: non-finite state at t = " + std::to_string(tn));
        times[i + 1] = tn;
        states.push_back(y);
    }
    times[n] = t2;
    return {std::move(times), std::move(states)};
}

} // namespace ceopt

#endif
