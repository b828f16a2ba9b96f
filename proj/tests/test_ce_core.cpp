#include "ceopt/ce_core.hpp"
#include "ceopt/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace ceopt;

TEST_CASE("sample_population: degenerate sigma yields copies of the mean")
{
    GaussianPopulationModel model{{0.3, -1.0, 2.5}, {0.0, 0.0, 0.0}};
    std::mt19937_64 rng(7);
    auto pop = sample_population(model, 5, rng);
    REQUIRE(pop.size() == 5);
    for (const auto& s : pop) {
        CHECK(s == model.means);
    }
}

TEST_CASE("sample_population: empirical mean obeys the 4/sqrt(N) bound")
{
    GaussianPopulationModel model{{0.0}, {1.0}};
    std::mt19937_64 rng(42);
    const std::size_t n = 100000;
    auto pop = sample_population(model, n, rng);
    double mean = 0.0;
    for (const auto& s : pop)
        mean += s[0];
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sample_population: fixed seed reproduces bitwise")
{
    GaussianPopulationModel model{{1.0, 2.0}, {0.5, 1.5}};
    std::mt19937_64 a(123), b(123);
    CHECK(sample_population(model, 50, a) == sample_population(model, 50, b));
}

TEST_CASE("sample_population: mismatched dimensions rejected")
{
    GaussianPopulationModel model{{1.0, 2.0}, {0.5}};
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(sample_population(model, 3, rng), DimensionError);
}

TEST_CASE("elite_select basics")
{
    SUBCASE("argmin")
    {
        const std::vector<double> scores{3, 1, 2};
        auto [idx, gamma] = elite_select(scores, 1);
        CHECK(idx == std::vector<std::size_t>{1});
        CHECK(gamma == 1);
    }
    SUBCASE("ties break by lowest index")
    {
        const std::vector<double> scores{5, 5, 5, 5};
        auto [idx, gamma] = elite_select(scores, 2);
        CHECK(idx == std::vector<std::size_t>{0, 1});
        CHECK(gamma == 5);
    }
    SUBCASE("gamma is the p-th order statistic")
    {
        std::vector<double> scores(100);
        std::iota(scores.begin(), scores.end(), 1.0);
        std::mt19937_64 rng(99);
        std::shuffle(scores.begin(), scores.end(), rng);
        auto [idx, gamma] = elite_select(scores, 10);
        CHECK(gamma == 10.0);
    }
    SUBCASE("invalid p")
    {
        const std::vector<double> scores{1, 2};
        CHECK_THROWS_AS(elite_select(scores, 0), ParameterError);
        CHECK_THROWS_AS(elite_select(scores, 3), ParameterError);
    }
}

TEST_CASE("elite_select: every elite score <= every excluded score")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0, 1);
    std::vector<double> scores(40);
    for (auto& s : scores)
        s = unif(rng);
    auto [idx, gamma] = elite_select(scores, 7);
    std::vector<char> elite(scores.size(), 0);
    for (auto i : idx)
        elite[i] = 1;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j)
            if (elite[i] && !elite[j])
                CHECK(scores[i] <= scores[j]);
}

TEST_CASE("update_gaussian")
{
    SUBCASE("single elite collapses to a point")
    {
        auto m = update_gaussian({{1.5, -2.0}});
        CHECK(m.means == std::vector<double>{1.5, -2.0});
        CHECK(m.stddevs == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("two-point symmetric set")
    {
        auto m = update_gaussian({{0.0}, {2.0}});
        CHECK(m.means[0] == doctest::Approx(1.0));
        CHECK(m.stddevs[0] == doctest::Approx(1.0));
    }
    SUBCASE("sampling-distribution check against Normal(3, 2^2)")
    {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> dist(3.0, 2.0);
        std::vector<std::vector<double>> elites(1000);
        for (auto& e : elites)
            e = {dist(rng)};
        auto m = update_gaussian(elites);
        const double se_mean = 2.0 / std::sqrt(1000.0);
        const double se_sd = 2.0 / std::sqrt(2.0 * 1000.0);
        CHECK(std::abs(m.means[0] - 3.0) < 5 * se_mean);
        CHECK(std::abs(m.stddevs[0] - 2.0) < 5 * se_sd);
    }
    SUBCASE("empty elite set rejected")
    {
        CHECK_THROWS_AS(update_gaussian({}), ParameterError);
    }
    SUBCASE("refitting the elites reproduces the stored mean")
    {
        std::mt19937_64 rng(8);
        std::normal_distribution<double> dist(0.0, 1.0);
        std::vector<std::vector<double>> elites(37);
        for (auto& e : elites)
            e = {dist(rng), dist(rng)};
        auto m = update_gaussian(elites);
        for (std::size_t i = 0; i < 2; ++i) {
            double mean = 0.0;
            for (const auto& e : elites)
                mean += e[i];
            mean /= static_cast<double>(elites.size());
            CHECK(m.means[i] == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("smooth")
{
    GaussianPopulationModel a{{4.0}, {2.0}};
    GaussianPopulationModel b{{2.0}, {1.0}};
    SUBCASE("alpha = 1 returns the new model")
    {
        auto m = smooth(a, b, 1.0);
        CHECK(m.means == a.means);
        CHECK(m.stddevs == a.stddevs);
    }
    SUBCASE("midpoint")
    {
        auto m = smooth(a, b, 0.5);
        CHECK(m.means[0] == doctest::Approx(3.0));
        CHECK(m.stddevs[0] == doctest::Approx(1.5));
    }
    SUBCASE("fixed point")
    {
        auto m = smooth(a, a, 0.3);
        CHECK(m.means[0] == doctest::Approx(4.0));
        CHECK(m.stddevs[0] == doctest::Approx(2.0));
    }
    SUBCASE("output is a convex combination")
    {
        auto m = smooth(a, b, 0.25);
        CHECK(m.means[0] >= 2.0);
        CHECK(m.means[0] <= 4.0);
        CHECK(m.stddevs[0] >= 1.0);
        CHECK(m.stddevs[0] <= 2.0);
    }
    SUBCASE("dimension mismatch rejected")
    {
        GaussianPopulationModel c{{1.0, 2.0}, {1.0, 1.0}};
        CHECK_THROWS_AS(smooth(a, c, 0.5), DimensionError);
    }
}

TEST_CASE("variance_stop")
{
    CHECK(variance_stop({{0.0, 0.0}, {0.0, 0.0}}, 1e-5));
    CHECK_FALSE(variance_stop({{0.0, 0.0}, {1e-6, 1e-4}}, 1e-5));
    CHECK(variance_stop({{0.0}, {9e-6}}, 1e-5));
}

TEST_CASE("moving_average_stop")
{
    SUBCASE("constant history is stationary from the first checkable t")
    {
        StopHistory h{std::vector<double>(2 + 1 + 1, 3.0), 2, 1};
        auto t = moving_average_stop(h, 1e-9);
        REQUIRE(t.has_value());
        CHECK(*t == 1); // first t with a full window and lookahead
    }
    SUBCASE("alternating history never settles")
    {
        // with K=3 the windowed relative variance alternates between
        // 3/16 and 3/25, so the spread ratio stays at 0.36 forever
        StopHistory h{{}, 3, 2};
        for (int i = 0; i < 40; ++i)
            h.gamma_history.push_back(i % 2 == 0 ? 1.0 : 2.0);
        CHECK_FALSE(moving_average_stop(h, 0.3).has_value());
    }
    SUBCASE("window matching the period sees a constant variance and fires")
    {
        // K=2 over 1,2,1,2,... always windows {1,2}: C is constant, the
        // spread is exactly 0 and the rule is satisfied immediately
        StopHistory h{{}, 2, 1};
        for (int i = 0; i < 10; ++i)
            h.gamma_history.push_back(i % 2 == 0 ? 1.0 : 2.0);
        CHECK(moving_average_stop(h, 1e-6).has_value());
    }
    SUBCASE("descending ramp with a flat tail")
    {
        // frozen from a direct evaluation of B_t, C_t, C_t+/- on this
        // sequence with K=3, R=2, eps=0.05
        StopHistory h{{}, 3, 2};
        for (int g = 10; g >= 1; --g)
            h.gamma_history.push_back(g);
        for (int i = 0; i < 20; ++i)
            h.gamma_history.push_back(1.0);
        auto t = moving_average_stop(h, 0.05);
        REQUIRE(t.has_value());
        CHECK(*t == 10);
        CHECK(h.gamma_history[*t] == 1.0); // inside the constant tail
    }
    SUBCASE("insufficient history returns absent")
    {
        StopHistory h{{1.0, 1.0, 1.0}, 3, 2};
        CHECK_FALSE(moving_average_stop(h, 0.5).has_value());
    }
}

TEST_CASE("ce_minimize: 1-d quadratic")
{
    CeSettings s;
    s.population_size = 100;
    s.elite_count = 10;
    s.rng_seed = 11;
    auto obj = [](std::span<const double> c) { return (c[0] - 3.0) * (c[0] - 3.0); };
    auto res = ce_minimize(obj, {{0.0}, {5.0}}, s);
    CHECK(std::abs(res.best[0] - 3.0) < 1e-3);
}

TEST_CASE("ce_minimize: constant objective")
{
    CeSettings s;
    s.population_size = 50;
    s.elite_count = 5;
    s.max_iterations = 40;
    s.rng_seed = 3;
    auto res = ce_minimize([](std::span<const double>) { return 7.0; }, {{0.0}, {1.0}}, s);
    CHECK(res.best_cost == 7.0);
    CHECK(res.log.size() <= 40);
}

TEST_CASE("ce_minimize: 5-d sphere around all-ones")
{
    CeSettings s;
    s.population_size = 200;
    s.elite_count = 20;
    s.rng_seed = 77;
    auto obj = [](std::span<const double> c) {
        double v = 0.0;
        for (double x : c)
            v += (x - 1.0) * (x - 1.0);
        return v;
    };
    GaussianPopulationModel init{std::vector<double>(5, 0.0), std::vector<double>(5, 3.0)};
    auto res = ce_minimize(obj, init, s);
    for (double x : res.best)
        CHECK(std::abs(x - 1.0) < 1e-2);
}

TEST_CASE("ce_minimize: gamma log equals the p-th order statistic per iteration")
{
    // re-derive the order statistic by replaying the sampling stream
    CeSettings s;
    s.population_size = 30;
    s.elite_count = 4;
    s.max_iterations = 5;
    s.epsilon = 1e-12;
    s.rng_seed = 10;
    auto obj = [](std::span<const double> c) { return c[0] * c[0]; };
    GaussianPopulationModel init{{1.0}, {2.0}};
    auto res = ce_minimize(obj, init, s);

    std::mt19937_64 rng(s.rng_seed);
    GaussianPopulationModel model = init;
    for (const auto& rec : res.log) {
        auto pop = sample_population(model, s.population_size, rng);
        std::vector<double> scores;
        for (const auto& c : pop)
            scores.push_back(obj(c));
        std::vector<double> sorted = scores;
        std::nth_element(sorted.begin(), sorted.begin() + 3, sorted.end());
        CHECK(rec.gamma_hat == sorted[3]);
        auto [idx, gamma] = elite_select(scores, s.elite_count);
        std::vector<std::vector<double>> elites;
        for (auto i : idx)
            elites.push_back(pop[i]);
        model = smooth(update_gaussian(elites), model, s.smoothing_alpha);
    }
}

TEST_CASE("ce_minimize: non-finite objective is reported")
{
    CeSettings s;
    s.population_size = 10;
    s.elite_count = 2;
    s.rng_seed = 1;
    auto obj = [](std::span<const double> c) {
        return c[0] > 0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    };
    GaussianPopulationModel init{{0.0}, {1.0}};
    CHECK_THROWS_AS(ce_minimize(obj, init, s), EvaluationError);
}

TEST_CASE("ce_minimize: thread count does not change the result")
{
    CeSettings s;
    s.population_size = 60;
    s.elite_count = 6;
    s.max_iterations = 30;
    s.rng_seed = 31;
    auto obj = [](std::span<const double> c) {
        return (c[0] - 2.0) * (c[0] - 2.0) + c[1] * c[1];
    };
    GaussianPopulationModel init{{0.0, 0.0}, {2.0, 2.0}};
    auto a = ce_minimize(obj, init, s, StopRule::VarianceCollapse, 5, 3, 1);
    auto b = ce_minimize(obj, init, s, StopRule::VarianceCollapse, 5, 3, 4);
    CHECK(a.best == b.best);
    CHECK(a.best_cost == b.best_cost);
}

TEST_CASE("ce_minimize: convex quadratic converges for at least 95/100 seeds")
{
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        CeSettings s;
        s.population_size = 80;
        s.elite_count = 8;
        s.rng_seed = static_cast<std::uint64_t>(seed);
        s.max_iterations = 300;
        auto obj = [](std::span<const double> c) {
            return 2.0 * (c[0] - 0.5) * (c[0] - 0.5) + (c[1] + 1.0) * (c[1] + 1.0);
        };
        GaussianPopulationModel init{{0.0, 0.0}, {2.0, 2.0}};
        auto res = ce_minimize(obj, init, s);
        const double max_sigma = res.log.back().max_sigma;
        if (max_sigma < s.epsilon)
            ++ok;
    }
    CHECK(ok >= 95);
}
