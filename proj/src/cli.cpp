#include "ceopt/cli.hpp"

#include "ceopt/errors.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace ceopt::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

void reject_unknown(const ordered_json& obj, const std::set<std::string>& allowed,
                    const std::string& key_path)
{
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            fail(key_path, "unknown key '" + key + "'");
}

template <class T>
T get_or(const ordered_json& obj, const std::string& key, T fallback)
{
    if (!obj.contains(key))
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(key, e.what());
    }
}

ordered_json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(path, "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        fail(path, "empty config: missing 'problem' selector");
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(path, e.what());
    }
}

Problem parse_problem(const std::string& name)
{
    if (name == "sirc-uncontrolled")
        return Problem::SircUncontrolled;
    if (name == "sirc-v1")
        return Problem::SircV1;
    if (name == "sirc-v2")
        return Problem::SircV2;
    if (name == "rank")
        return Problem::Rank;
    if (name == "svrp")
        return Problem::Svrp;
    fail("problem", "unknown problem selector '" + name + "'");
}

void parse_sirc_section(const ordered_json& cfg, RunConfig& rc)
{
    ordered_json sec = cfg.value("sirc", ordered_json::object());
    reject_unknown(sec,
                   {"scenario", "initial", "horizon", "step", "control_intervals",
                    "control_bounds", "parameters", "weights"},
                   "sirc");

    rc.scenario_name = get_or<std::string>(sec, "scenario", "start");
    double t1 = 0.0, t2 = 1.0;
    if (sec.contains("horizon")) {
        auto h = sec.at("horizon");
        if (!h.is_array() || h.size() != 2)
            fail("sirc.horizon", "expected [t1, t2]");
        t1 = h[0].get<double>();
        t2 = h[1].get<double>();
    }
    const double step = get_or<double>(sec, "step", 1e-3);
    const auto intervals = get_or<std::size_t>(sec, "control_intervals", 20);
    double lo = 0.0, hi = 0.9;
    if (sec.contains("control_bounds")) {
        auto b = sec.at("control_bounds");
        if (!b.is_array() || b.size() != 2)
            fail("sirc.control_bounds", "expected [lower, upper]");
        lo = b[0].get<double>();
        hi = b[1].get<double>();
    }
    if (hi > 1.0)
        std::cerr << "warning: sirc.control_bounds upper bound " << hi
                  << " exceeds the population-fraction range [0, 1]\n";

    sirc::Scenario sc = rc.scenario_name == "developed" ? sirc::make_developed_scenario()
                                                        : sirc::make_start_scenario();
    if (rc.scenario_name != "start" && rc.scenario_name != "developed" &&
        rc.scenario_name != "custom")
        fail("sirc.scenario", "expected 'start', 'developed' or 'custom'");
    if (rc.scenario_name == "custom" && !sec.contains("initial"))
        fail("sirc.initial", "custom scenario requires an initial state");
    if (sec.contains("initial")) {
        auto init = sec.at("initial");
        reject_unknown(init, {"S", "I", "R", "C"}, "sirc.initial");
        sc.initial = {get_or<double>(init, "S", 0.0), get_or<double>(init, "I", 0.0),
                      get_or<double>(init, "R", 0.0), get_or<double>(init, "C", 0.0)};
    }
    sc.t_start = t1;
    sc.t_end = t2;
    sc.step = step;
    sc.u_grid = ControlGrid::uniform(t1, t2, intervals, lo, hi);
    sc.v_grid = sc.u_grid;

    if (sec.contains("parameters")) {
        auto par = sec.at("parameters");
        reject_unknown(par,
                       {"mortality_rate", "contact_rate", "cross_immunity_loss_rate",
                        "recovery_rate", "immunity_loss_rate", "reinfection_probability",
                        "control_weight_susceptible", "control_weight_infected"},
                       "sirc.parameters");
        auto& p = sc.params;
        p.mortality_rate = get_or<double>(par, "mortality_rate", p.mortality_rate);
        p.contact_rate = get_or<double>(par, "contact_rate", p.contact_rate);
        p.cross_immunity_loss_rate =
            get_or<double>(par, "cross_immunity_loss_rate", p.cross_immunity_loss_rate);
        p.recovery_rate = get_or<double>(par, "recovery_rate", p.recovery_rate);
        p.immunity_loss_rate = get_or<double>(par, "immunity_loss_rate", p.immunity_loss_rate);
        p.reinfection_probability =
            get_or<double>(par, "reinfection_probability", p.reinfection_probability);
        p.control_weight_susceptible =
            get_or<double>(par, "control_weight_susceptible", p.control_weight_susceptible);
        p.control_weight_infected =
            get_or<double>(par, "control_weight_infected", p.control_weight_infected);
    }
    if (sec.contains("weights")) {
        auto w = sec.at("weights");
        reject_unknown(w,
                       {"susceptible_weight", "infected_weight", "effort_weight_u",
                        "effort_weight_v"},
                       "sirc.weights");
        auto& cw = sc.weights;
        cw.susceptible_weight = get_or<double>(w, "susceptible_weight", cw.susceptible_weight);
        cw.infected_weight = get_or<double>(w, "infected_weight", cw.infected_weight);
        cw.effort_weight_u = get_or<double>(w, "effort_weight_u", cw.effort_weight_u);
        cw.effort_weight_v = get_or<double>(w, "effort_weight_v", cw.effort_weight_v);
    }
    sc.validate();
    rc.scenario = std::move(sc);
}

ordered_json echo_sirc(const RunConfig& rc)
{
    const auto& sc = rc.scenario;
    return ordered_json{
        {"scenario", rc.scenario_name},
        {"initial",
         {{"S", sc.initial.susceptible},
          {"I", sc.initial.infected},
          {"R", sc.initial.recovered},
          {"C", sc.initial.cross_immune}}},
        {"horizon", {sc.t_start, sc.t_end}},
        {"step", sc.step},
        {"control_intervals", sc.u_grid.node_count() - 1},
        {"control_bounds", {sc.u_grid.lower, sc.u_grid.upper}},
        {"parameters",
         {{"mortality_rate", sc.params.mortality_rate},
          {"contact_rate", sc.params.contact_rate},
          {"cross_immunity_loss_rate", sc.params.cross_immunity_loss_rate},
          {"recovery_rate", sc.params.recovery_rate},
          {"immunity_loss_rate", sc.params.immunity_loss_rate},
          {"reinfection_probability", sc.params.reinfection_probability},
          {"control_weight_susceptible", sc.params.control_weight_susceptible},
          {"control_weight_infected", sc.params.control_weight_infected}}},
        {"weights",
         {{"susceptible_weight", sc.weights.susceptible_weight},
          {"infected_weight", sc.weights.infected_weight},
          {"effort_weight_u", sc.weights.effort_weight_u},
          {"effort_weight_v", sc.weights.effort_weight_v}}}};
}

} // namespace

std::string problem_name(Problem p)
{
    switch (p) {
    case Problem::SircUncontrolled: return "sirc-uncontrolled";
    case Problem::SircV1: return "sirc-v1";
    case Problem::SircV2: return "sirc-v2";
    case Problem::Rank: return "rank";
    case Problem::Svrp: return "svrp";
    }
    return "?";
}

svrp::RoutingInstance load_instance(const std::string& path)
{
    ordered_json doc = load_json(path);
    reject_unknown(doc,
                   {"customers", "capacity", "distance", "demand_mean", "demand_stddev",
                    "penalty"},
                   path);
    svrp::RoutingInstance inst;
    if (!doc.contains("customers"))
        fail(path, "missing 'customers'");
    inst.customers = doc.at("customers").get<std::size_t>();
    inst.capacity = get_or<double>(doc, "capacity", 0.0);
    if (!doc.contains("distance"))
        fail(path, "missing 'distance' matrix");
    inst.distance = doc.at("distance").get<std::vector<std::vector<double>>>();
    inst.demand_mean = get_or<std::vector<double>>(doc, "demand_mean", {});
    inst.demand_stddev =
        get_or<std::vector<double>>(doc, "demand_stddev",
                                    std::vector<double>(inst.customers, 0.0));
    inst.penalty = get_or<std::vector<double>>(doc, "penalty",
                                               std::vector<double>(inst.customers, 0.0));
    inst.validate();
    return inst;
}

RunConfig parse_config(const std::string& path)
{
    ordered_json cfg = load_json(path);
    reject_unknown(cfg, {"problem", "seed", "threads", "output_dir", "ce", "sirc", "rank", "svrp"},
                   "");
    if (!cfg.contains("problem"))
        fail(path, "missing 'problem' selector");

    RunConfig rc;
    rc.problem = parse_problem(cfg.at("problem").get<std::string>());
    rc.seed = get_or<std::uint64_t>(cfg, "seed", kDefaultSeed);
    rc.threads = get_or<unsigned>(cfg, "threads", 1);
    rc.output_dir = get_or<std::string>(cfg, "output_dir", "out");

    const bool is_sirc = rc.problem == Problem::SircUncontrolled ||
                         rc.problem == Problem::SircV1 || rc.problem == Problem::SircV2;
    // the moving-average rule tolerates a much looser epsilon than the
    // variance-collapse rule
    const double default_epsilon = is_sirc ? 1e-5 : 0.05;

    ordered_json ce = cfg.value("ce", ordered_json::object());
    reject_unknown(ce,
                   {"population_size", "elite_count", "smoothing_alpha", "epsilon",
                    "max_iterations"},
                   "ce");
    rc.ce.population_size = get_or<std::size_t>(ce, "population_size", 100);
    rc.ce.elite_count = get_or<std::size_t>(
        ce, "elite_count",
        static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(rc.ce.population_size))));
    rc.ce.smoothing_alpha = get_or<double>(ce, "smoothing_alpha", 0.7);
    rc.ce.epsilon = get_or<double>(ce, "epsilon", default_epsilon);
    rc.ce.max_iterations = get_or<std::size_t>(ce, "max_iterations", 500);
    rc.ce.rng_seed = rc.seed;
    rc.ce.validate();

    switch (rc.problem) {
    case Problem::SircUncontrolled:
    case Problem::SircV1:
    case Problem::SircV2:
        parse_sirc_section(cfg, rc);
        break;
    case Problem::Rank: {
        if (!cfg.contains("rank"))
            fail("rank", "missing section for the rank problem");
        ordered_json sec = cfg.at("rank");
        reject_unknown(sec,
                       {"num_items", "num_picks", "score_replications", "sample_size",
                        "elite_fraction", "window", "lookahead"},
                       "rank");
        if (!sec.contains("num_items") || !sec.contains("num_picks"))
            fail("rank", "num_items and num_picks are required");
        rc.rank_items = sec.at("num_items").get<std::size_t>();
        rc.rank_picks = sec.at("num_picks").get<std::size_t>();
        rc.rank_options.score_replications =
            get_or<std::size_t>(sec, "score_replications", 200);
        rc.rank_options.sample_size = get_or<std::size_t>(sec, "sample_size", 500);
        rc.rank_options.elite_fraction = get_or<double>(sec, "elite_fraction", 0.1);
        rc.rank_options.window = get_or<std::size_t>(sec, "window", 5);
        rc.rank_options.lookahead = get_or<std::size_t>(sec, "lookahead", 3);
        if (rc.rank_picks == 0 || rc.rank_picks > rc.rank_items)
            fail("rank", "num_picks must satisfy 1 <= k <= num_items");
        break;
    }
    case Problem::Svrp: {
        if (!cfg.contains("svrp"))
            fail("svrp", "missing section for the svrp problem");
        ordered_json sec = cfg.at("svrp");
        reject_unknown(sec, {"instance", "cost_replications", "window", "lookahead", "arc_floor"},
                       "svrp");
        if (!sec.contains("instance"))
            fail("svrp.instance", "instance file path is required");
        rc.svrp_instance_path = sec.at("instance").get<std::string>();
        if (!fs::exists(rc.svrp_instance_path))
            fail("svrp.instance", "file not found: " + rc.svrp_instance_path);
        rc.svrp_instance = load_instance(rc.svrp_instance_path);
        rc.svrp_options.cost_replications = get_or<std::size_t>(sec, "cost_replications", 200);
        rc.svrp_options.window = get_or<std::size_t>(sec, "window", 5);
        rc.svrp_options.lookahead = get_or<std::size_t>(sec, "lookahead", 3);
        rc.svrp_options.arc_floor = get_or<double>(sec, "arc_floor", 1e-6);
        break;
    }
    }

    // canonical echo; excludes execution details (threads, output_dir)
    rc.resolved = ordered_json{{"problem", problem_name(rc.problem)},
                               {"seed", rc.seed},
                               {"ce",
                                {{"population_size", rc.ce.population_size},
                                 {"elite_count", rc.ce.elite_count},
                                 {"smoothing_alpha", rc.ce.smoothing_alpha},
                                 {"epsilon", rc.ce.epsilon},
                                 {"max_iterations", rc.ce.max_iterations}}}};
    if (is_sirc)
        rc.resolved["sirc"] = echo_sirc(rc);
    if (rc.problem == Problem::Rank)
        rc.resolved["rank"] = ordered_json{
            {"num_items", rc.rank_items},
            {"num_picks", rc.rank_picks},
            {"score_replications", rc.rank_options.score_replications},
            {"sample_size", rc.rank_options.sample_size},
            {"elite_fraction", rc.rank_options.elite_fraction},
            {"window", rc.rank_options.window},
            {"lookahead", rc.rank_options.lookahead}};
    if (rc.problem == Problem::Svrp)
        rc.resolved["svrp"] = ordered_json{
            {"instance", rc.svrp_instance_path},
            {"cost_replications", rc.svrp_options.cost_replications},
            {"window", rc.svrp_options.window},
            {"lookahead", rc.svrp_options.lookahead},
            {"arc_floor", rc.svrp_options.arc_floor}};
    return rc;
}

namespace {

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

struct Artifacts {
    std::string trajectory_csv;
    std::string iterations_csv;
    ordered_json summary;
};

std::string iterations_csv(const std::vector<IterationRecord>& log)
{
    std::string out = "iteration,gamma_hat,best_cost,max_sigma\n";
    for (const auto& rec : log)
        out += std::to_string(rec.iteration) + "," + fmt(rec.gamma_hat) + "," +
               fmt(rec.best_score) + "," + fmt(rec.max_sigma) + "\n";
    return out;
}

std::string trajectory_csv(const sirc::Trajectory& traj)
{
    std::string out = "t,S,I,R,C,u,v\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        out += fmt(traj.times[i]) + "," + fmt(s.susceptible) + "," + fmt(s.infected) + "," +
               fmt(s.recovered) + "," + fmt(s.cross_immune) + "," + fmt(traj.u[i]) + "," +
               fmt(traj.v[i]) + "\n";
    }
    return out;
}

Artifacts run_sirc(const RunConfig& rc)
{
    Artifacts art;
    const auto& sc = rc.scenario;
    if (rc.problem == Problem::SircUncontrolled) {
        auto traj = sirc::simulate(sc.params, sc.initial, sc.t_start, sc.t_end, sc.step);
        const double cost = sirc::cost_from_trajectory(traj, sc.weights);
        art.trajectory_csv = trajectory_csv(traj);
        art.iterations_csv = iterations_csv({});
        art.summary["metrics"] = ordered_json{{"cost_index", cost}};
        return art;
    }

    CeSettings settings = rc.ce;
    settings.rng_seed = rc.seed;
    sirc::OptimizationResult res =
        rc.problem == Problem::SircV1 ? sirc::optimize_alternating(sc, settings, rc.threads)
                                      : sirc::optimize_joint(sc, settings, rc.threads);
    auto traj = sirc::simulate_controlled(res.u, res.v, sc);
    art.trajectory_csv = trajectory_csv(traj);
    art.iterations_csv = iterations_csv(res.log);
    art.summary["metrics"] = ordered_json{
        {"cost_index", res.cost},
        {"iterations", res.log.empty() ? 0 : res.log.back().iteration},
        {"u_nodes", res.u},
        {"v_nodes", res.v}};
    return art;
}

Artifacts run_rank(const RunConfig& rc)
{
    CeSettings settings = rc.ce;
    settings.rng_seed = rc.seed;
    auto res = rank::ce_rank_optimize(rc.rank_items, rc.rank_picks, settings, rc.rank_options,
                                      rc.threads);
    Artifacts art;
    // the solution artifact is the threshold table itself
    std::string csv = "remaining,position,threshold\n";
    for (std::size_t r = 1; r <= res.strategy.num_picks; ++r) {
        const auto& row = res.strategy.rows[r - 1];
        for (std::size_t idx = 0; idx < row.size(); ++idx)
            csv += std::to_string(r) + "," + std::to_string(res.strategy.row_start(r) + idx) +
                   "," + std::to_string(row[idx]) + "\n";
    }
    art.trajectory_csv = std::move(csv);
    art.iterations_csv = iterations_csv(res.log);
    art.summary["metrics"] = ordered_json{
        {"s_hat", res.estimated_value},
        {"iterations", res.log.empty() ? 0 : res.log.back().iteration}};
    return art;
}

Artifacts run_svrp(const RunConfig& rc)
{
    CeSettings settings = rc.ce;
    settings.rng_seed = rc.seed;
    auto res = svrp::ce_route_optimize(rc.svrp_instance, settings, rc.svrp_options, rc.threads);
    Artifacts art;
    std::string csv = "step,node\n0,0\n";
    for (std::size_t i = 0; i < res.route.size(); ++i)
        csv += std::to_string(i + 1) + "," + std::to_string(res.route[i]) + "\n";
    art.trajectory_csv = std::move(csv);
    art.iterations_csv = iterations_csv(res.log);
    art.summary["metrics"] = ordered_json{{"g_hat", res.cost.mean},
                                          {"std_error", res.cost.std_error},
                                          {"route", res.route}};
    return art;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << content;
}

} // namespace

int run(const RunConfig& config)
{
    const auto t0 = std::chrono::steady_clock::now();
    Artifacts art;
    switch (config.problem) {
    case Problem::SircUncontrolled:
    case Problem::SircV1:
    case Problem::SircV2:
        art = run_sirc(config);
        break;
    case Problem::Rank:
        art = run_rank(config);
        break;
    case Problem::Svrp:
        art = run_svrp(config);
        break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ordered_json summary;
    summary["schema_version"] = 1;
    summary["problem"] = problem_name(config.problem);
    summary["seed"] = config.seed;
    summary["metrics"] = art.summary["metrics"];
    summary["config"] = config.resolved;
    summary["wall_time_seconds"] = wall;

    // all computation succeeded; now write the three artifacts
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    write_file(dir / "trajectory.csv", art.trajectory_csv);
    write_file(dir / "iterations.csv", art.iterations_csv);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

} // namespace ceopt::cli
