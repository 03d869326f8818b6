#include "aqucb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "aqucb/text.hpp"

namespace aqucb {

namespace {

constexpr double kOptimismSlack = 1e-10;
constexpr double kZeroEpsilon = 1e-10;  // measured error below this counts as exact

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace

VisitSumCheck visit_sum_check(const AgentState& state) {
    const int H = state.horizon(), M = state.num_cells();
    long long max_visits = 0;
    for (int h = 0; h < H; ++h)
        for (int m = 0; m < M; ++m) max_visits = std::max(max_visits, state.visits(h, m));

    // prefix[n] = sum_{j=1..n} 1/sqrt(j)
    std::vector<double> prefix(static_cast<std::size_t>(max_visits) + 1, 0.0);
    for (long long j = 1; j <= max_visits; ++j)
        prefix[static_cast<std::size_t>(j)] =
            prefix[static_cast<std::size_t>(j - 1)] + 1.0 / std::sqrt(static_cast<double>(j));

    VisitSumCheck check;
    for (int h = 0; h < H; ++h)
        for (int m = 0; m < M; ++m) check.lhs += prefix[static_cast<std::size_t>(state.visits(h, m))];
    const double hk = static_cast<double>(H) * static_cast<double>(H) *
                      static_cast<double>(M) * static_cast<double>(state.episode_index());
    check.rhs = 2.0 * std::sqrt(hk);
    check.ok = check.lhs <= check.rhs + 1e-9;
    return check;
}

double theorem_bound(long long episodes, int horizon, int num_cells, double delta,
                     double epsilon) {
    const double K = static_cast<double>(episodes);
    const double H = static_cast<double>(horizon);
    const double M = static_cast<double>(num_cells);
    return 24.0 * std::sqrt(std::pow(H, 5) * M * K * std::log(3.0 * H * K / delta)) +
           12.0 * std::sqrt(2.0 * H * H * H * K * std::log(3.0 / delta)) + 3.0 * H * H * M +
           6.0 * epsilon * H * K;
}

long long count_optimism_violations(const AgentState& state, const QTables& q_star,
                                    const Aggregation& agg) {
    if (agg.horizon != q_star.horizon || agg.horizon != state.horizon() ||
        agg.num_cells != state.num_cells())
        throw std::invalid_argument("count_optimism_violations: dimension mismatch");
    long long violations = 0;
    for (int h = 0; h < agg.horizon; ++h)
        for (int s = 0; s < agg.num_states; ++s)
            for (int a = 0; a < agg.num_actions; ++a)
                if (state.q_hat(h, agg.cell(h, s, a)) < q_star.at(h, s, a) - kOptimismSlack)
                    ++violations;
    return violations;
}

LossCheck asymptotic_loss_check(const RegretLedger& ledger, double epsilon, int horizon,
                                int num_cells, double delta, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw std::invalid_argument("asymptotic_loss_check: tail_fraction must lie in (0,1)");
    const long long K = static_cast<long long>(ledger.instantaneous.size());
    if (K < 1) throw std::invalid_argument("asymptotic_loss_check: empty ledger");
    const long long tail = std::max<long long>(1, static_cast<long long>(
                                                      std::llround(tail_fraction * static_cast<double>(K))));
    LossCheck check;
    for (long long k = K - tail; k < K; ++k)
        check.tail_average += ledger.instantaneous[static_cast<std::size_t>(k)];
    check.tail_average /= static_cast<double>(tail);

    const double H = static_cast<double>(horizon);
    const double M = static_cast<double>(num_cells);
    const double slack = 24.0 * std::sqrt(std::pow(H, 5) * M *
                                          std::log(3.0 * H * static_cast<double>(K) / delta) /
                                          static_cast<double>(tail));
    check.threshold = 6.0 * epsilon * H + slack;
    check.ok = check.tail_average <= check.threshold;
    return check;
}

GeneratedInstance build_instance(const ExperimentConfig& cfg) {
    if (cfg.generator == "chain") {
        EpisodicMdp mdp = chain_mdp(cfg.horizon, cfg.chain_length, cfg.chain_slip);
        Aggregation agg = trivial_aggregation(mdp.horizon(), mdp.num_states(), mdp.num_actions());
        const double eps = epsilon_of(mdp, agg);
        return {std::move(mdp), std::move(agg), eps};
    }
    if (cfg.generator == "random") {
        EpisodicMdp mdp =
            random_mdp(cfg.horizon, cfg.env_states, cfg.env_actions, cfg.env_sparsity, cfg.env_seed);
        if (cfg.reward_lo != 0.0 || cfg.reward_hi != 1.0)
            mdp = with_rewards_rescaled(mdp, cfg.reward_lo, cfg.reward_hi);
        Aggregation agg = trivial_aggregation(mdp.horizon(), mdp.num_states(), mdp.num_actions());
        const double eps = epsilon_of(mdp, agg);
        return {std::move(mdp), std::move(agg), eps};
    }
    if (cfg.generator == "duplication") {
        EpisodicMdp base = random_mdp(cfg.horizon, cfg.dup_latent_states, cfg.dup_actions,
                                      cfg.dup_sparsity, cfg.dup_base_seed);
        if (cfg.reward_lo != 0.0 || cfg.reward_hi != 1.0)
            base = with_rewards_rescaled(base, cfg.reward_lo, cfg.reward_hi);
        GeneratedInstance instance = expand_aggregate_mdp(
            {std::move(base), cfg.dup_copies, cfg.dup_perturbation, cfg.dup_seed});
        if (cfg.aggregation_kind == "trivial") {
            instance.aggregation = trivial_aggregation(instance.mdp.horizon(),
                                                       instance.mdp.num_states(),
                                                       instance.mdp.num_actions());
            instance.measured_epsilon = epsilon_of(instance.mdp, instance.aggregation);
        }
        return instance;
    }
    if (cfg.generator == "file") {
        EpisodicMdp mdp = EpisodicMdp::from_json(load_json_file(cfg.mdp_path));
        Aggregation agg =
            cfg.aggregation_kind == "file"
                ? Aggregation::from_json(load_json_file(cfg.aggregation_path), mdp.horizon(),
                                         mdp.num_states(), mdp.num_actions())
                : trivial_aggregation(mdp.horizon(), mdp.num_states(), mdp.num_actions());
        const double eps = epsilon_of(mdp, agg);
        return {std::move(mdp), std::move(agg), eps};
    }
    throw ConfigError("unknown generator '" + cfg.generator + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    GeneratedInstance instance = build_instance(cfg);
    const EpisodicMdp& mdp = instance.mdp;
    const Aggregation& agg = instance.aggregation;
    validate(agg, mdp);

    const long long eval_cost = static_cast<long long>(mdp.num_states()) * mdp.num_states() *
                                mdp.num_actions() * mdp.horizon();
    if (eval_cost > cfg.eval_budget)
        throw std::runtime_error("run_experiment: exact policy evaluation budget exceeded (" +
                                 std::to_string(eval_cost) + " > " +
                                 std::to_string(cfg.eval_budget) + ")");

    const auto [q_star, v_star] = backward_induction(mdp);
    const double v1 = v_star.at(0, mdp.initial_state());
    const long long K = cfg.episodes;

    ExperimentResult result;
    result.measured_epsilon = instance.measured_epsilon;
    result.epsilon_used = cfg.epsilon == "auto" ? instance.measured_epsilon
                                                : std::stod(cfg.epsilon);
    result.v_star_s1 = v1;
    result.horizon = mdp.horizon();
    result.num_states = mdp.num_states();
    result.num_actions = mdp.num_actions();
    result.num_cells = agg.num_cells;
    result.stride = cfg.stride != 0 ? cfg.stride : (K <= 10'000 ? 1 : 10);
    result.bound_value = theorem_bound(K, mdp.horizon(), agg.num_cells, cfg.delta,
                                       result.epsilon_used);

    result.effective = cfg;
    result.effective.epsilon = format_double(result.epsilon_used);
    result.effective.stride = result.stride;

    const bool monitor_optimism = instance.measured_epsilon <= kZeroEpsilon;
    const BonusFn bonus = cfg.algorithm == "aqucb"
                              ? BonusSchedule(mdp.horizon(), K, cfg.delta, result.epsilon_used).as_fn()
                              : zero_bonus();

    const long long stride = result.stride;
    auto run_seed = [&](std::uint64_t seed) {
        RegretLedger ledger;
        ledger.seed = seed;
        ledger.instantaneous.assign(static_cast<std::size_t>(K), 0.0);
        ledger.cumulative.assign(static_cast<std::size_t>(K), 0.0);
        ledger.evaluated.assign(static_cast<std::size_t>(K), 0);
        ledger.optimism_monitored = monitor_optimism;

        double held_regret = 0.0;
        double cumulative = 0.0;
        auto observer = [&](long long k, const AgentState& state, const Trajectory&) {
            const bool evaluate = k == 1 || k == K || k % stride == 0;
            if (evaluate) {
                const DeterministicPolicy pi = induced_greedy_policy(state, agg);
                held_regret = v1 - policy_value(mdp, pi).at(0, mdp.initial_state());
                ledger.evaluated[static_cast<std::size_t>(k - 1)] = 1;
                if (monitor_optimism)
                    ledger.optimism_violations += count_optimism_violations(state, q_star, agg);
            }
            ledger.instantaneous[static_cast<std::size_t>(k - 1)] = held_regret;
            cumulative += held_regret;
            ledger.cumulative[static_cast<std::size_t>(k - 1)] = cumulative;
        };

        const RunResult run = run_with_bonus(mdp, agg, bonus, K, seed, observer,
                                             /*keep_trajectories=*/false);
        ledger.visit_sum = visit_sum_check(run.final_state);
        if (!ledger.visit_sum.ok)
            throw std::runtime_error("visit_sum_check failed for seed " + std::to_string(seed));
        return ledger;
    };

    result.ledgers.resize(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size()) return;
            try {
                result.ledgers[i] = run_seed(cfg.seeds[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t num_threads = std::min<std::size_t>(hw, cfg.seeds.size());
    std::vector<std::thread> threads;
    threads.reserve(num_threads);
    for (std::size_t t = 0; t < num_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    return result;
}

void write_regret_csv(const ExperimentResult& result, std::ostream& out) {
    out << "seed,k,instantaneous_regret,cumulative_regret,evaluated\n";
    for (const auto& ledger : result.ledgers) {
        for (std::size_t i = 0; i < ledger.instantaneous.size(); ++i) {
            out << ledger.seed << ',' << (i + 1) << ',' << format_double(ledger.instantaneous[i])
                << ',' << format_double(ledger.cumulative[i]) << ','
                << (ledger.evaluated[i] ? 1 : 0) << '\n';
        }
    }
}

nlohmann::ordered_json summary_json(const ExperimentResult& result) {
    nlohmann::ordered_json j;
    j["config"] = result.effective.to_flat().to_json();
    j["instance"] = {{"horizon", result.horizon},
                     {"num_states", result.num_states},
                     {"num_actions", result.num_actions},
                     {"num_cells", result.num_cells},
                     {"measured_epsilon", result.measured_epsilon},
                     {"v_star_s1", result.v_star_s1}};
    j["schedule"] = {{"episodes", result.effective.episodes},
                     {"delta", result.effective.delta},
                     {"epsilon_used", result.epsilon_used}};
    j["theorem_bound"] = result.bound_value;
    j["evaluation"] = {{"stride", result.stride},
                       {"interpolated", result.stride > 1}};

    nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
    double sum_final = 0.0;
    double min_final = 0.0, max_final = 0.0;
    long long clean_runs = 0;
    bool all_visit_ok = true;
    for (std::size_t i = 0; i < result.ledgers.size(); ++i) {
        const auto& ledger = result.ledgers[i];
        const double final_regret = ledger.cumulative.empty() ? 0.0 : ledger.cumulative.back();
        sum_final += final_regret;
        min_final = i == 0 ? final_regret : std::min(min_final, final_regret);
        max_final = i == 0 ? final_regret : std::max(max_final, final_regret);
        if (ledger.optimism_violations == 0) ++clean_runs;
        all_visit_ok = all_visit_ok && ledger.visit_sum.ok;
        per_seed.push_back({{"seed", ledger.seed},
                            {"final_cumulative_regret", final_regret},
                            {"optimism_violations", ledger.optimism_violations},
                            {"visit_sum_lhs", ledger.visit_sum.lhs},
                            {"visit_sum_rhs", ledger.visit_sum.rhs},
                            {"visit_sum_ok", ledger.visit_sum.ok}});
    }
    const double n = result.ledgers.empty() ? 1.0 : static_cast<double>(result.ledgers.size());
    j["regret"] = {{"mean_final", sum_final / n},
                   {"min_final", min_final},
                   {"max_final", max_final}};
    j["optimism"] = {{"monitored", !result.ledgers.empty() && result.ledgers[0].optimism_monitored},
                     {"clean_runs", clean_runs},
                     {"total_runs", result.ledgers.size()},
                     {"clean_fraction", static_cast<double>(clean_runs) / n}};
    j["visit_sum_all_ok"] = all_visit_ok;
    j["per_seed"] = std::move(per_seed);
    return j;
}

}  // namespace aqucb
