#include "aqucb/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"

#include "aqucb/harness.hpp"
#include "aqucb/plot.hpp"
#include "aqucb/text.hpp"

namespace aqucb::cli {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << contents;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

/// Classifies failures per the exit-code contract and prints the reason.
template <typename Fn>
int guarded(bool quiet, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    (void)quiet;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir_override, const std::string& seeds_override, bool quiet) {
    return guarded(quiet, [&] {
        FlatConfig flat = FlatConfig::parse_file(config_path);
        for (const auto& assignment : overrides) flat.apply_override(assignment);
        if (!seeds_override.empty()) flat.set("harness", "seeds", seeds_override);
        if (!out_dir_override.empty()) flat.set("output", "dir", out_dir_override);
        const ExperimentConfig cfg = ExperimentConfig::from_flat(flat);

        const auto started = std::chrono::steady_clock::now();
        const ExperimentResult result = run_experiment(cfg);
        const auto finished = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(finished - started).count();

        const fs::path out_dir{cfg.out_dir};
        fs::create_directories(out_dir);

        std::ofstream csv(out_dir / "regret.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write regret.csv under '" + cfg.out_dir + "'");
        write_regret_csv(result, csv);
        csv.close();

        write_file(out_dir / "summary.json", summary_json(result).dump(2) + "\n");
        write_file(out_dir / "effective_config.ini", result.effective.to_flat().serialize());

        // Wall-clock stats live in their own file so summary.json and the CSV
        // stay byte-identical across reruns of the same configuration.
        nlohmann::ordered_json timing;
        timing["wall_clock_seconds"] = seconds;
        timing["seeds"] = cfg.seeds.size();
        timing["episodes"] = cfg.episodes;
        write_file(out_dir / "timing.json", timing.dump(2) + "\n");

        if (!quiet) {
            std::cout << "wrote " << (out_dir / "regret.csv").string() << " and summary.json ("
                      << cfg.seeds.size() << " seeds, K=" << cfg.episodes << ", "
                      << format_double(seconds) << "s)\n";
            std::cout << "measured epsilon = " << format_double(result.measured_epsilon)
                      << ", V*_1(s1) = " << format_double(result.v_star_s1)
                      << ", theorem bound = " << format_double(result.bound_value) << "\n";
        }
        return kExitOk;
    });
}

int cmd_gen(const std::string& generator, const std::vector<std::string>& params,
            const std::string& out_dir, bool quiet) {
    return guarded(quiet, [&] {
        FlatConfig flat;
        flat.set("environment", "generator", generator);
        for (const auto& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("generator parameter '" + p + "' is not of the form key=value");
            flat.set("environment", std::string(trim(p.substr(0, eq))),
                     std::string(trim(p.substr(eq + 1))));
        }
        // instance generation needs no agent/harness settings; stub them out
        flat.set("agent", "episodes", "1");
        flat.set("harness", "seeds", "1");
        const ExperimentConfig cfg = ExperimentConfig::from_flat(flat);
        const GeneratedInstance instance = build_instance(cfg);

        const fs::path dir{out_dir};
        fs::create_directories(dir);
        write_file(dir / "mdp.json", instance.mdp.to_json().dump(2) + "\n");
        write_file(dir / "aggregation.json", instance.aggregation.to_json().dump(2) + "\n");

        nlohmann::ordered_json meta;
        meta["generator"] = generator;
        nlohmann::ordered_json echo = nlohmann::ordered_json::object();
        for (const auto& [key, value] : flat.sections().at("environment")) echo[key] = value;
        meta["params"] = std::move(echo);
        meta["measured_epsilon"] = instance.measured_epsilon;
        meta["num_states"] = instance.mdp.num_states();
        meta["num_actions"] = instance.mdp.num_actions();
        meta["horizon"] = instance.mdp.horizon();
        meta["num_cells"] = instance.aggregation.num_cells;
        write_file(dir / "meta.json", meta.dump(2) + "\n");

        if (!quiet)
            std::cout << "wrote " << (dir / "mdp.json").string() << " (S="
                      << instance.mdp.num_states() << ", A=" << instance.mdp.num_actions()
                      << ", H=" << instance.mdp.horizon()
                      << ", epsilon=" << format_double(instance.measured_epsilon) << ")\n";
        return kExitOk;
    });
}

int cmd_solve(const std::string& mdp_path, const std::string& out_dir, bool quiet) {
    return guarded(quiet, [&] {
        const EpisodicMdp mdp = EpisodicMdp::from_json(load_json_file(mdp_path));
        const auto [q_star, v_star] = backward_induction(mdp);
        const double v1 = v_star.at(0, mdp.initial_state());

        nlohmann::ordered_json j;
        j["v_star_s1"] = v1;
        auto q = nlohmann::json::array();
        auto v = nlohmann::json::array();
        for (int h = 0; h < mdp.horizon(); ++h) {
            auto q_stage = nlohmann::json::array();
            auto v_stage = nlohmann::json::array();
            for (int s = 0; s < mdp.num_states(); ++s) {
                auto per_state = nlohmann::json::array();
                for (int a = 0; a < mdp.num_actions(); ++a) per_state.push_back(q_star.at(h, s, a));
                q_stage.push_back(std::move(per_state));
                v_stage.push_back(v_star.at(h, s));
            }
            q.push_back(std::move(q_stage));
            v.push_back(std::move(v_stage));
        }
        j["q_star"] = std::move(q);
        j["v_star"] = std::move(v);

        const fs::path dir{out_dir};
        fs::create_directories(dir);
        write_file(dir / "solution.json", j.dump(2) + "\n");

        std::cout << format_double(v1) << "\n";
        if (!quiet)
            std::cerr << "wrote " << (dir / "solution.json").string() << "\n";
        return kExitOk;
    });
}

int cmd_inspect(const std::string& mdp_path, const std::string& aggregation_path, bool quiet) {
    return guarded(quiet, [&] {
        const EpisodicMdp mdp = EpisodicMdp::from_json(load_json_file(mdp_path));
        double r_lo = 1.0, r_hi = 0.0;
        for (int h = 0; h < mdp.horizon(); ++h)
            for (int s = 0; s < mdp.num_states(); ++s)
                for (int a = 0; a < mdp.num_actions(); ++a) {
                    r_lo = std::min(r_lo, mdp.mean_reward(h, s, a));
                    r_hi = std::max(r_hi, mdp.mean_reward(h, s, a));
                }
        std::cout << "states " << mdp.num_states() << ", actions " << mdp.num_actions()
                  << ", horizon " << mdp.horizon() << ", initial state " << mdp.initial_state()
                  << "\n";
        std::cout << "mean rewards in [" << format_double(r_lo) << ", " << format_double(r_hi)
                  << "], " << (mdp.has_reward_noise() ? "stochastic" : "deterministic")
                  << " rewards\n";
        const auto [q_star, v_star] = backward_induction(mdp);
        std::cout << "V*_1(s1) = " << format_double(v_star.at(0, mdp.initial_state())) << "\n";

        if (!aggregation_path.empty()) {
            const Aggregation agg =
                Aggregation::from_json(load_json_file(aggregation_path), mdp.horizon(),
                                       mdp.num_states(), mdp.num_actions());
            const AggregationReport report = validate(agg, mdp);
            std::cout << "aggregation: " << agg.num_cells
                      << " cells, epsilon = " << format_double(epsilon_of(q_star, agg)) << "\n";
            if (!quiet) {
                for (int h = 0; h < agg.horizon; ++h) {
                    int used = 0;
                    for (int count : report.occupancy[h])
                        if (count > 0) ++used;
                    std::cout << "  stage " << (h + 1) << ": " << used << "/" << agg.num_cells
                              << " cells occupied\n";
                }
            }
        }
        return kExitOk;
    });
}

int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_svg,
             bool bound_overlay, const std::string& summary_path, bool quiet) {
    return guarded(quiet, [&] {
        if (csv_paths.empty()) throw ConfigError("plot: no input CSV files");

        std::vector<RegretGroup> groups;
        groups.reserve(csv_paths.size());
        for (const auto& path : csv_paths) groups.push_back(read_regret_csv(path));

        BoundOverlay overlay;
        if (bound_overlay) {
            if (summary_path.empty())
                throw ConfigError("plot: --bound needs --summary <summary.json>");
            const nlohmann::json summary = load_json_file(summary_path);
            overlay.enabled = true;
            overlay.horizon = summary.at("instance").at("horizon").get<int>();
            overlay.num_cells = summary.at("instance").at("num_cells").get<int>();
            overlay.delta = summary.at("schedule").at("delta").get<double>();
            overlay.epsilon = summary.at("schedule").at("epsilon_used").get<double>();
        }

        write_file(out_svg, render_regret_svg(groups, overlay));
        if (!quiet) std::cout << "wrote " << out_svg << "\n";
        return kExitOk;
    });
}

}  // namespace aqucb::cli
