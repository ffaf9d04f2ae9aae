#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace rc = riskfusion::cli;

int main(int argc, char** argv) {
    CLI::App app{"riskfusion: risk-averse social sensors under a price-setting controller"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "key = value configuration file")->required();
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    app.add_option("--seed", seed, "random seed (overrides seed)");
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto* solve = app.add_subcommand("solve", "value iteration; writes value.csv, policy.csv, thresholds.json");
    auto* simulate = app.add_subcommand("simulate", "closed-loop traces; writes traces.jsonl, ensemble.csv");
    std::optional<std::string> policy_file;
    simulate->add_option("--policy", policy_file, "policy.csv to follow (default <out>/policy.csv)");
    auto* verify = app.add_subcommand("verify", "run the invariant battery; writes verify.json");
    auto* sweep = app.add_subcommand("sweep-alpha", "thresholds across risk levels; writes sweep.csv");
    std::optional<std::string> alphas_text;
    sweep->add_option("--alphas", alphas_text, "comma-separated alpha list (overrides alphas)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? rc::kOk : rc::kValidationError;
    }

    try {
        auto config = rc::load_config(config_path);
        if (out_dir) config.output_dir = *out_dir;
        if (seed) config.seed = *seed;
        if (alphas_text) {
            // Reuse the config parser so the list syntax is identical.
            config.alphas = rc::parse_config("alphas = " + *alphas_text).alphas;
        }
        const rc::Log log{quiet ? nullptr : &std::cout};

        if (*solve) {
            rc::cmd_solve(config, log);
        } else if (*simulate) {
            std::optional<std::filesystem::path> p;
            if (policy_file) p = *policy_file;
            rc::cmd_simulate(config, p, log);
        } else if (*verify) {
            const auto report = rc::cmd_verify(config, log);
            if (!report.passed()) {
                std::cerr << "verification failed\n";
                return rc::kVerificationFailure;
            }
        } else if (*sweep) {
            const auto rows = rc::cmd_sweep_alpha(config, config.alphas, log);
            for (const auto& r : rows)
                if (!r.thresholds) return rc::kNumericalFailure;
        }
    } catch (...) {
        return rc::exit_code_for_current_exception(std::cerr);
    }
    return rc::kOk;
}
