#ifndef CEOPT_CLI_HPP
#define CEOPT_CLI_HPP

#include "ceopt/ce_core.hpp"
#include "ceopt/epi_opt.hpp"
#include "ceopt/rank_select.hpp"
#include "ceopt/svrp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace ceopt::cli {

enum class Problem { SircUncontrolled, SircV1, SircV2, Rank, Svrp };

std::string problem_name(Problem p);

/// Fully resolved run description: every default materialized, every
/// referenced file loaded. `resolved` is the canonical echo embedded in
/// summary.json; it excludes execution details (threads, output path) so
/// reruns with a different worker count produce identical summaries.
struct RunConfig {
    Problem problem = Problem::SircUncontrolled;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output_dir = "out";

    CeSettings ce;

    // sirc-* problems
    sirc::Scenario scenario;
    std::string scenario_name = "start";

    // rank problem
    std::size_t rank_items = 0;
    std::size_t rank_picks = 0;
    rank::RankCeOptions rank_options;

    // svrp problem
    std::string svrp_instance_path;
    svrp::RoutingInstance svrp_instance;
    svrp::SvrpCeOptions svrp_options;

    nlohmann::ordered_json resolved;
};

/// Parses and validates a JSON config file. Unknown keys are rejected
/// with their key path; missing values get documented defaults.
RunConfig parse_config(const std::string& path);

/// Loads an SVRP instance file (JSON: customers, capacity, distance,
/// demand_mean, demand_stddev, penalty).
svrp::RoutingInstance load_instance(const std::string& path);

/// Executes the configured problem and writes trajectory.csv,
/// iterations.csv and summary.json into the output directory. All three
/// artifacts are written only after the computation succeeds. Returns 0
/// on success.
int run(const RunConfig& config);

} // namespace ceopt::cli

#endif
