#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aqucb/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"AQ-UCB: optimistic Q-learning with aggregated states — exact-regret experiments"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --quiet appear after the subcommand too

    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress progress output");

    // run
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    std::string run_config, run_out, run_seeds;
    std::vector<std::string> run_sets;
    run->add_option("--config", run_config, "experiment config file")->required();
    run->add_option("--out", run_out, "output directory (overrides [output] dir)");
    run->add_option("--set", run_sets, "override, repeatable: section.key=value");
    run->add_option("--seeds", run_seeds, "seed list override, e.g. 1,2,3 or 1..30");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a benchmark instance");
    std::string gen_name, gen_out = "out";
    std::vector<std::string> gen_sets;
    gen->add_option("generator", gen_name, "chain | random | duplication")->required();
    gen->add_option("--set", gen_sets, "generator parameter, repeatable: key=value");
    gen->add_option("--out", gen_out, "output directory");

    // solve
    auto* solve = app.add_subcommand("solve", "solve an MDP exactly by backward induction");
    std::string solve_mdp, solve_out = "out";
    solve->add_option("--mdp", solve_mdp, "MDP JSON file")->required();
    solve->add_option("--out", solve_out, "output directory");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "describe an instance");
    std::string inspect_mdp, inspect_agg;
    inspect->add_option("--mdp", inspect_mdp, "MDP JSON file")->required();
    inspect->add_option("--aggregation", inspect_agg, "aggregation JSON file");

    // plot
    auto* plot = app.add_subcommand("plot", "render cumulative-regret curves as SVG");
    std::vector<std::string> plot_csvs;
    std::string plot_out = "regret.svg", plot_summary;
    bool plot_bound = false;
    plot->add_option("--csv", plot_csvs, "harness CSV, repeatable")->required();
    plot->add_option("--out", plot_out, "output SVG path");
    plot->add_flag("--bound", plot_bound, "overlay the regret envelope");
    plot->add_option("--summary", plot_summary, "summary.json for the envelope parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : aqucb::cli::kExitConfig;
    }

    if (run->parsed())
        return aqucb::cli::cmd_run(run_config, run_sets, run_out, run_seeds, quiet);
    if (gen->parsed()) return aqucb::cli::cmd_gen(gen_name, gen_sets, gen_out, quiet);
    if (solve->parsed()) return aqucb::cli::cmd_solve(solve_mdp, solve_out, quiet);
    if (inspect->parsed()) return aqucb::cli::cmd_inspect(inspect_mdp, inspect_agg, quiet);
    if (plot->parsed())
        return aqucb::cli::cmd_plot(plot_csvs, plot_out, plot_bound, plot_summary, quiet);
    return aqucb::cli::kExitConfig;
}
