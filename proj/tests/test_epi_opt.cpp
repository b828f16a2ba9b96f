#include "ceopt/epi_opt.hpp"
#include "ceopt/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace ceopt;
using namespace ceopt::sirc;

namespace {

Scenario coarse_start()
{
    Scenario s = make_start_scenario();
    s.step = 2e-3;
    s.u_grid = ControlGrid::uniform(s.t_start, s.t_end, 6, 0.0, 0.9);
    s.v_grid = s.u_grid;
    return s;
}

CeSettings quick_settings(std::uint64_t seed)
{
    CeSettings c;
    c.population_size = 40;
    c.elite_count = 4;
    c.epsilon = 1e-3;
    c.max_iterations = 120;
    c.rng_seed = seed;
    return c;
}

} // namespace

TEST_CASE("scenario factories expose the published setups")
{
    auto start = make_start_scenario();
    CHECK(start.initial.susceptible == doctest::Approx(1.0 - 1e-6));
    CHECK(start.initial.infected == doctest::Approx(1e-6));
    CHECK(start.initial.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(start.t_start == 0.0);
    CHECK(start.t_end == 1.0);
    CHECK(start.u_grid.node_count() == 21);
    CHECK(start.u_grid.lower == 0.0);
    CHECK(start.u_grid.upper == 0.9);
    CHECK(start.weights.susceptible_weight == doctest::Approx(1e-3));
    CHECK(start.weights.infected_weight == doctest::Approx(0.997));
    CHECK(start.weights.effort_weight_u == doctest::Approx(1e-3));
    CHECK(start.weights.effort_weight_v == doctest::Approx(1e-3));

    auto dev = make_developed_scenario();
    CHECK(dev.initial.susceptible == doctest::Approx(0.99));
    CHECK(dev.initial.infected == doctest::Approx(5e-3));
    CHECK(dev.initial.recovered == doctest::Approx(3e-3));
    CHECK(dev.initial.cross_immune == doctest::Approx(2e-3));
}

TEST_CASE("cost_index: pure-effort scenario reduces to the analytic integral")
{
    Scenario s = coarse_start();
    s.weights.susceptible_weight = 0.0;
    s.weights.infected_weight = 0.0;
    const double u0 = 0.3;
    std::vector<double> u(s.u_grid.node_count(), u0);
    std::vector<double> v(s.v_grid.node_count(), 0.0);
    const double expected = 0.5 * s.weights.effort_weight_u * u0 * u0 * (s.t_end - s.t_start);
    CHECK(cost_index(u, v, s) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("cost_index: uncontrolled cost is positive and matches the trajectory quadrature")
{
    Scenario s = coarse_start();
    std::vector<double> zero_u(s.u_grid.node_count(), 0.0);
    std::vector<double> zero_v(s.v_grid.node_count(), 0.0);
    const double j = cost_index(zero_u, zero_v, s);
    CHECK(j > 0.0);
    auto traj = simulate_controlled(zero_u, zero_v, s);
    CHECK(cost_from_trajectory(traj, s.weights) == doctest::Approx(j).epsilon(1e-14));
}

TEST_CASE("cost_index rejects control vectors that do not match their grids")
{
    Scenario s = coarse_start();
    std::vector<double> bad(s.u_grid.node_count() + 1, 0.0);
    std::vector<double> v(s.v_grid.node_count(), 0.0);
    CHECK_THROWS_AS(cost_index(bad, v, s), DimensionError);
}

TEST_CASE("optimize_alternating with max_iterations = 0 is a no-op")
{
    Scenario s = coarse_start();
    CeSettings c = quick_settings(5);
    c.max_iterations = 0;
    auto res = optimize_alternating(s, c);
    CHECK(res.log.empty());
    // the initial model mean is the midpoint of the control box
    for (double x : res.u)
        CHECK(x == doctest::Approx(0.45));
    for (double x : res.v)
        CHECK(x == doctest::Approx(0.45));
    CHECK(res.cost == doctest::Approx(cost_index(res.u, res.v, s)).epsilon(1e-12));
}

TEST_CASE("optimize_joint: decoupled controls are driven toward zero")
{
    // no transmission, no infected, and controls detached from the
    // dynamics: any control effort only adds cost, so the optimum is 0
    Scenario s = coarse_start();
    s.params.contact_rate = 0.0;
    s.params.control_weight_susceptible = 0.0;
    s.params.control_weight_infected = 0.0;
    s.initial = {1.0, 0.0, 0.0, 0.0};
    s.weights.effort_weight_u = 0.1; // make the effort signal dominate
    s.weights.effort_weight_v = 0.1;
    s.u_grid = ControlGrid::uniform(s.t_start, s.t_end, 3, 0.0, 0.9);
    s.v_grid = s.u_grid;
    CeSettings c = quick_settings(8);
    c.max_iterations = 400;
    auto res = optimize_joint(s, c);
    // the effective (clamped, interpolated) controls must sit at the
    // lower box edge: negative node values evaluate to 0
    for (double t : {0.0, 0.2, 0.45, 0.7, 1.0}) {
        CHECK(eval_control(res.u, t, s.u_grid) <= 0.05);
        CHECK(eval_control(res.v, t, s.v_grid) <= 0.05);
    }
}

TEST_CASE("both optimizers beat the uncontrolled cost on a coarse setup")
{
    Scenario s = coarse_start();
    std::vector<double> zero_u(s.u_grid.node_count(), 0.0);
    std::vector<double> zero_v(s.v_grid.node_count(), 0.0);
    const double uncontrolled = cost_index(zero_u, zero_v, s);

    auto joint = optimize_joint(s, quick_settings(13));
    auto alt = optimize_alternating(s, quick_settings(13));
    CHECK(joint.cost < uncontrolled);
    CHECK(alt.cost < uncontrolled);

    SUBCASE("stored cost matches a fresh evaluation")
    {
        CHECK(joint.cost == doctest::Approx(cost_index(joint.u, joint.v, s)).epsilon(1e-12));
        CHECK(alt.cost == doctest::Approx(cost_index(alt.u, alt.v, s)).epsilon(1e-12));
    }

    SUBCASE("interpolated controls respect the box at random times")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unif(s.t_start, s.t_end);
        for (int rep = 0; rep < 1000; ++rep) {
            const double t = unif(rng);
            for (const auto* res : {&joint, &alt}) {
                const double uu = eval_control(res->u, t, s.u_grid);
                const double vv = eval_control(res->v, t, s.v_grid);
                CHECK(uu >= 0.0);
                CHECK(uu <= 0.9);
                CHECK(vv >= 0.0);
                CHECK(vv <= 0.9);
            }
        }
    }

    SUBCASE("iteration log is 1-based and contiguous")
    {
        REQUIRE_FALSE(joint.log.empty());
        for (std::size_t i = 0; i < joint.log.size(); ++i)
            CHECK(joint.log[i].iteration == i + 1);
        REQUIRE_FALSE(alt.log.empty());
        for (std::size_t i = 0; i < alt.log.size(); ++i)
            CHECK(alt.log[i].iteration == i + 1);
    }
}

TEST_CASE("optimizers are reproducible and thread-count invariant")
{
    Scenario s = coarse_start();
    s.u_grid = ControlGrid::uniform(s.t_start, s.t_end, 4, 0.0, 0.9);
    s.v_grid = s.u_grid;
    CeSettings c = quick_settings(21);
    c.max_iterations = 25;
    auto a = optimize_joint(s, c, 1);
    auto b = optimize_joint(s, c, 4);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.cost == b.cost);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].gamma_hat == b.log[i].gamma_hat);
        CHECK(a.log[i].best_score == b.log[i].best_score);
    }
}

TEST_CASE("scenario validation rejects a non-normalized initial state")
{
    Scenario s = coarse_start();
    s.initial = {0.5, 0.1, 0.1, 0.1};
    CHECK_THROWS_AS(s.validate(), ParameterError);
}
