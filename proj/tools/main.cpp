#include "ceopt/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <random>

int main(int argc, char** argv)
{
    CLI::App app{"Cross-entropy optimization toolkit: SIRC intervention control, "
                 "rank-minimizing multiple choice and stochastic vehicle routing"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool entropy_seed = false;

    auto* run_cmd = app.add_subcommand("run", "execute a configured problem");
    run_cmd->add_option("config", config_path, "path to the JSON config")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the RNG seed");
    run_cmd->add_option("--out", out_dir, "override the output directory");
    run_cmd->add_option("--threads", threads, "worker threads for objective evaluation");
    run_cmd->add_flag("--entropy-seed", entropy_seed,
                      "seed from system entropy instead of the config value");

    auto* validate_cmd = app.add_subcommand("validate", "parse and validate a config");
    validate_cmd->add_option("config", config_path, "path to the JSON config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ceopt::cli::RunConfig config = ceopt::cli::parse_config(config_path);
        if (validate_cmd->parsed()) {
            std::cout << "ok: " << config_path << "\n";
            return 0;
        }
        if (entropy_seed)
            seed = std::random_device{}();
        if (!seed_opt->empty() || entropy_seed) {
            config.seed = seed;
            config.ce.rng_seed = seed;
            config.resolved["seed"] = seed;
        }
        if (!out_dir.empty())
            config.output_dir = out_dir;
        if (threads > 0)
            config.threads = threads;
        return ceopt::cli::run(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
