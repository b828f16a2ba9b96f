#include "ceopt/sirc.hpp"

#include "ceopt/errors.hpp"
#include "ceopt/rk4.hpp"

#include <cmath>

namespace ceopt::sirc {

void SircParameters::validate() const
{
    const double rates[] = {mortality_rate, contact_rate, cross_immunity_loss_rate,
                            recovery_rate, immunity_loss_rate,
                            control_weight_susceptible, control_weight_infected};
    for (double r : rates)
        if (!(r >= 0.0))
            throw ParameterError("SIRC rates and control weights must be nonnegative");
    if (!(reinfection_probability >= 0.0) || reinfection_probability > 1.0)
        throw ParameterError("reinfection probability must lie in [0, 1]");
}

bool state_is_finite(const SircState& s)
{
    return std::isfinite(s.susceptible) && std::isfinite(s.infected) &&
           std::isfinite(s.recovered) && std::isfinite(s.cross_immune);
}

SircState sirc_rhs(const SircState& y, const SircParameters& p, double u, double v)
{
    const double S = y.susceptible;
    const double I = y.infected;
    const double R = y.recovered;
    const double C = y.cross_immune;
    const double g = p.control_weight_susceptible * S * u;
    const double h = p.control_weight_infected * I * v;
    SircState d;
    d.susceptible = p.mortality_rate * (1.0 - S) - p.contact_rate * S * I +
                    p.cross_immunity_loss_rate * C - g;
    d.infected = p.contact_rate * S * I +
                 p.reinfection_probability * p.contact_rate * C * I -
                 (p.mortality_rate + p.recovery_rate) * I - h;
    d.recovered = (1.0 - p.reinfection_probability) * p.contact_rate * C * I +
                  p.recovery_rate * I - (p.mortality_rate + p.immunity_loss_rate) * R + g + h;
    d.cross_immune = p.immunity_loss_rate * R - p.contact_rate * C * I -
                     (p.mortality_rate + p.cross_immunity_loss_rate) * C;
    return d;
}

Trajectory simulate(const SircParameters& params, const SircState& initial,
                    double t1, double t2, double h,
                    const ControlSignal& u, const ControlSignal& v)
{
    params.validate();
    const auto uat = [&](double t) { return u ? u(t) : 0.0; };
    const auto vat = [&](double t) { return v ? v(t) : 0.0; };
    auto rhs = [&](double t, const SircState& y) {
        return sirc_rhs(y, params, uat(t), vat(t));
    };
    auto [times, states] = integrate_rk4(rhs, initial, t1, t2, h);

    Trajectory traj;
    traj.times = std::move(times);
    traj.states = std::move(states);
    traj.u.reserve(traj.times.size());
    traj.v.reserve(traj.times.size());
    for (double t : traj.times) {
        traj.u.push_back(uat(t));
        traj.v.push_back(vat(t));
    }
    return traj;
}

} // namespace ceopt::sirc
