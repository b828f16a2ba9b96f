#ifndef CEOPT_SIRC_HPP
#define CEOPT_SIRC_HPP

#include <functional>
#include <vector>

namespace ceopt::sirc {

/// Model coefficients, rates in year^-1.
struct SircParameters {
    double mortality_rate = 1.0 / 75.0;        // mu
    double contact_rate = 146.0;               // beta
    double cross_immunity_loss_rate = 0.5;     // gamma, C -> S
    double recovery_rate = 365.0 / 5.0;        // alpha, I -> R
    double immunity_loss_rate = 1.0;           // delta, R -> C
    double reinfection_probability = 0.078;    // sigma
    double control_weight_susceptible = 2.0;   // rho1
    double control_weight_infected = 2.0;      // rho2

    void validate() const; // throws ParameterError
};

/// Population fractions of the four compartments.
struct SircState {
    double susceptible = 0.0;
    double infected = 0.0;
    double recovered = 0.0;
    double cross_immune = 0.0;

    double sum() const { return susceptible + infected + recovered + cross_immune; }
};

inline SircState operator+(const SircState& a, const SircState& b)
{
    return {a.susceptible + b.susceptible, a.infected + b.infected,
            a.recovered + b.recovered, a.cross_immune + b.cross_immune};
}

inline SircState operator*(double c, const SircState& a)
{
    return {c * a.susceptible, c * a.infected, c * a.recovered, c * a.cross_immune};
}

bool state_is_finite(const SircState& s);

/// Time derivative of the controlled system. The control terms move
/// rho1*S*u susceptibles and rho2*I*v infected into R; with u = v = 0
/// this is the plain uncontrolled model.
SircState sirc_rhs(const SircState& state, const SircParameters& params, double u, double v);

/// Solution on a uniform time grid, with the control values that were in
/// effect at each grid point.
struct Trajectory {
    std::vector<double> times;
    std::vector<SircState> states;
    std::vector<double> u;
    std::vector<double> v;
};

using ControlSignal = std::function<double(double)>;

/// Integrates the controlled system with fixed-step RK4; controls are
/// evaluated at the RK4 sub-stage times. Pass null signals for the
/// uncontrolled model.
Trajectory simulate(const SircParameters& params, const SircState& initial,
                    double t1, double t2, double h,
                    const ControlSignal& u = {}, const ControlSignal& v = {});

} // namespace ceopt::sirc

#endif
