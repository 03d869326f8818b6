#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "aqucb/agent.hpp"
#include "aqucb/config.hpp"
#include "aqucb/env_suite.hpp"

namespace aqucb {

/// The deterministic counting inequality: over a completed run,
///   sum_h sum_m sum_{j=1..N_h(m)} 1/sqrt(j)  <=  2 sqrt(H^2 M K),
/// which holds for every run because the visit counts at each stage sum to K.
struct VisitSumCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

VisitSumCheck visit_sum_check(const AgentState& state);

/// The high-probability regret envelope
///   24 sqrt(H^5 M K log(3HK/delta)) + 12 sqrt(2 H^3 K log(3/delta))
///   + 3 H^2 M + 6 epsilon H K.
double theorem_bound(long long episodes, int horizon, int num_cells, double delta,
                     double epsilon);

/// Number of (h, s, a) triples whose aggregate estimate undercuts the optimal
/// value by more than 1e-10. Meaningful only on zero-error aggregations, where
/// the estimates dominate Q* with probability at least 1 - delta.
long long count_optimism_violations(const AgentState& state, const QTables& q_star,
                                    const Aggregation& agg);

/// Per-seed record of exact per-episode regret plus monitor outcomes.
struct RegretLedger {
    std::uint64_t seed = 0;
    std::vector<double> instantaneous;    // index k-1 holds episode k
    std::vector<double> cumulative;       // prefix sums of instantaneous
    std::vector<std::uint8_t> evaluated;  // 0 = held from the last evaluated episode
    bool optimism_monitored = false;
    long long optimism_violations = 0;
    VisitSumCheck visit_sum;
};

struct LossCheck {
    double tail_average = 0.0;
    double threshold = 0.0;
    bool ok = false;
};

/// Mean instantaneous regret over the trailing tail_fraction of episodes,
/// against the per-period threshold 6 epsilon H plus the envelope's sqrt term
/// amortized over the tail, 24 sqrt(H^5 M log(3HK/delta) / K_tail).
LossCheck asymptotic_loss_check(const RegretLedger& ledger, double epsilon, int horizon,
                                int num_cells, double delta, double tail_fraction);

struct ExperimentResult {
    ExperimentConfig effective;  // epsilon/stride resolved; rerunning it reproduces the outputs
    double measured_epsilon = 0.0;
    double epsilon_used = 0.0;
    double bound_value = 0.0;
    double v_star_s1 = 0.0;
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    int num_cells = 0;
    long long stride = 1;
    std::vector<RegretLedger> ledgers;  // one per seed, in config order
};

/// Builds the configured environment and aggregation and measures epsilon.
GeneratedInstance build_instance(const ExperimentConfig& cfg);

/// Solves the instance once, runs the configured agent for each seed (seeds in
/// parallel), and evaluates the greedy policy exactly at every stride-selected
/// episode; skipped episodes hold the last evaluated value and are flagged.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// CSV rows seed,k,instantaneous_regret,cumulative_regret,evaluated.
void write_regret_csv(const ExperimentResult& result, std::ostream& out);

nlohmann::ordered_json summary_json(const ExperimentResult& result);

}  // namespace aqucb
