#include "ceopt/epi_opt.hpp"

#include "ceopt/errors.hpp"
#include "ceopt/parallel.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <utility>

namespace ceopt::sirc {

void CostWeights::validate() const
{
    if (!(susceptible_weight >= 0.0) || !(infected_weight >= 0.0) ||
        !(effort_weight_u >= 0.0) || !(effort_weight_v >= 0.0))
        throw ParameterError("cost weights must be nonnegative");
}

void Scenario::validate() const
{
    params.validate();
    weights.validate();
    u_grid.validate();
    v_grid.validate();
    if (!(t_end > t_start))
        throw ParameterError("scenario horizon must have t_end > t_start");
    if (!(step > 0.0))
        throw ParameterError("scenario step must be positive");
    const double comps[] = {initial.susceptible, initial.infected,
                            initial.recovered, initial.cross_immune};
    for (double c : comps)
        if (!(c >= 0.0))
            throw ParameterError("initial compartments must be nonnegative");
    if (std::abs(initial.sum() - 1.0) > 1e-9)
        throw ParameterError("initial compartments must sum to 1");
}

Trajectory simulate_controlled(std::span<const double> u, std::span<const double> v,
                               const Scenario& scenario)
{
    const auto& sc = scenario;
    ControlSignal uf = [&sc, u](double t) { return eval_control(u, t, sc.u_grid); };
    ControlSignal vf = [&sc, v](double t) { return eval_control(v, t, sc.v_grid); };
    return simulate(sc.params, sc.initial, sc.t_start, sc.t_end, sc.step, uf, vf);
}

double cost_from_trajectory(const Trajectory& traj, const CostWeights& w)
{
    double total = 0.0;
    auto integrand = [&](std::size_t i) {
        return w.susceptible_weight * traj.states[i].susceptible +
               w.infected_weight * traj.states[i].infected +
               0.5 * w.effort_weight_u * traj.u[i] * traj.u[i] +
               0.5 * w.effort_weight_v * traj.v[i] * traj.v[i];
    };
    for (std::size_t i = 1; i < traj.times.size(); ++i)
        total += 0.5 * (traj.times[i] - traj.times[i - 1]) * (integrand(i - 1) + integrand(i));
    return total;
}

double cost_index(std::span<const double> u, std::span<const double> v,
                  const Scenario& scenario)
{
    return cost_from_trajectory(simulate_controlled(u, v, scenario), scenario.weights);
}

namespace {

GaussianPopulationModel initial_model(const ControlGrid& grid)
{
    GaussianPopulationModel m;
    m.means.assign(grid.node_count(), 0.5 * (grid.lower + grid.upper));
    m.stddevs.assign(grid.node_count(), 0.5);
    return m;
}

struct WallClock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

} // namespace

OptimizationResult optimize_joint(const Scenario& scenario, const CeSettings& settings,
                                  unsigned threads)
{
    scenario.validate();
    settings.validate();
    WallClock clock;

    GaussianPopulationModel mu = initial_model(scenario.u_grid);
    GaussianPopulationModel mv = initial_model(scenario.v_grid);
    std::mt19937_64 rng(settings.rng_seed);

    OptimizationResult result;
    for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
        auto pu = sample_population(mu, settings.population_size, rng);
        auto pv = sample_population(mv, settings.population_size, rng);
        std::vector<double> scores(settings.population_size);
        std::vector<std::size_t> bad(settings.population_size, 0);
        parallel_for(settings.population_size, threads, [&](std::size_t m) {
            scores[m] = cost_index(pu[m], pv[m], scenario);
            if (!std::isfinite(scores[m]))
                bad[m] = 1;
        });
        for (std::size_t m = 0; m < bad.size(); ++m)
            if (bad[m])
                throw EvaluationError("cost index non-finite for sample " + std::to_string(m));

        auto [elite_idx, gamma_hat] = elite_select(scores, settings.elite_count);
        std::vector<std::vector<double>> eu, ev;
        eu.reserve(elite_idx.size());
        ev.reserve(elite_idx.size());
        for (std::size_t m : elite_idx) {
            eu.push_back(pu[m]);
            ev.push_back(pv[m]);
        }
        mu = smooth(update_gaussian(eu), mu, settings.smoothing_alpha);
        mv = smooth(update_gaussian(ev), mv, settings.smoothing_alpha);

        const double max_sigma = std::max(mu.max_stddev(), mv.max_stddev());
        result.log.push_back({it, gamma_hat, scores[elite_idx.front()], max_sigma});

        if (variance_stop(mu, settings.epsilon) && variance_stop(mv, settings.epsilon))
            break;
    }

    result.u = mu.means;
    result.v = mv.means;
    result.cost = cost_index(result.u, result.v, scenario);
    result.wall_seconds = clock.seconds();
    return result;
}

OptimizationResult optimize_alternating(const Scenario& scenario, const CeSettings& settings,
                                        unsigned threads)
{
    scenario.validate();
    settings.validate();
    WallClock clock;

    // stage 1: optimize u with v fixed at zero
    const std::vector<double> v_fixed(scenario.v_grid.node_count(), 0.0);
    CeSettings stage = settings;
    stage.rng_seed = derive_seed(settings.rng_seed, 1);
    auto u_obj = [&](std::span<const double> c) { return cost_index(c, v_fixed, scenario); };
    CeResult ures = ce_minimize(u_obj, initial_model(scenario.u_grid), stage,
                                StopRule::VarianceCollapse, 5, 3, threads);

    // stage 2: optimize v with the stage-1 u fixed
    stage.rng_seed = derive_seed(settings.rng_seed, 2);
    auto v_obj = [&](std::span<const double> c) { return cost_index(ures.best, c, scenario); };
    CeResult vres = ce_minimize(v_obj, initial_model(scenario.v_grid), stage,
                                StopRule::VarianceCollapse, 5, 3, threads);

    OptimizationResult result;
    result.u = std::move(ures.best);
    result.v = std::move(vres.best);
    result.cost = cost_index(result.u, result.v, scenario);
    result.log = std::move(ures.log);
    const std::size_t offset = result.log.empty() ? 0 : result.log.back().iteration;
    for (auto rec : vres.log) {
        rec.iteration += offset;
        result.log.push_back(rec);
    }
    result.wall_seconds = clock.seconds();
    return result;
}

namespace {

Scenario base_scenario()
{
    Scenario sc;
    sc.t_start = 0.0;
    sc.t_end = 1.0;
    sc.step = 1e-3;
    sc.u_grid = ControlGrid::uniform(sc.t_start, sc.t_end, 20, 0.0, 0.9);
    sc.v_grid = sc.u_grid;
    return sc;
}

} // namespace

Scenario make_start_scenario()
{
    Scenario sc = base_scenario();
    sc.initial = {1.0 - 1e-6, 1e-6, 0.0, 0.0};
    return sc;
}

Scenario make_developed_scenario()
{
    Scenario sc = base_scenario();
    sc.initial = {0.99, 5e-3, 3e-3, 2e-3};
    return sc;
}

} // namespace ceopt::sirc
