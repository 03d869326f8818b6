#pragma once

#include <string>
#include <vector>

namespace aqucb::cli {

// Exit-code contract: 0 success, 1 runtime failure, 2 configuration error.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

/// Runs the configured experiment and writes regret.csv, summary.json,
/// effective_config.ini and timing.json under the output directory.
int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir_override, const std::string& seeds_override, bool quiet);

/// Generates an instance (mdp.json, aggregation.json, meta.json with the
/// measured aggregation error) under the output directory.
int cmd_gen(const std::string& generator, const std::vector<std::string>& params,
            const std::string& out_dir, bool quiet);

/// Solves an MDP exactly and writes solution.json; prints the optimal value at
/// the initial state.
int cmd_solve(const std::string& mdp_path, const std::string& out_dir, bool quiet);

/// Prints a human-readable description of an instance.
int cmd_inspect(const std::string& mdp_path, const std::string& aggregation_path, bool quiet);

/// Renders cumulative-regret curves from harness CSVs into an SVG, optionally
/// overlaying the regret envelope read from a summary.json.
int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_svg,
             bool bound_overlay, const std::string& summary_path, bool quiet);

}  // namespace aqucb::cli
