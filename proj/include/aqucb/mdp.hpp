#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "aqucb/rng.hpp"

namespace aqucb {

/// Stage-indexed state-action value table. Real stages run 0..H-1; index H is
/// a virtual terminal stage kept explicitly at zero so backups can read it
/// without special cases.
struct QTables {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;

    QTables() = default;
    QTables(int H, int S, int A)
        : horizon(H),
          num_states(S),
          num_actions(A),
          values(static_cast<std::size_t>(H + 1) * S * A, 0.0) {}

    std::size_t index(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
    }
    double at(int h, int s, int a) const { return values[index(h, s, a)]; }
    double& at(int h, int s, int a) { return values[index(h, s, a)]; }
};

/// Stage-indexed state value table, same layout conventions as QTables.
struct VTables {
    int horizon = 0;
    int num_states = 0;
    std::vector<double> values;

    VTables() = default;
    VTables(int H, int S)
        : horizon(H), num_states(S), values(static_cast<std::size_t>(H + 1) * S, 0.0) {}

    std::size_t index(int h, int s) const {
        return static_cast<std::size_t>(h) * num_states + s;
    }
    double at(int h, int s) const { return values[index(h, s)]; }
    double& at(int h, int s) { return values[index(h, s)]; }
};

/// One action per (stage, state).
struct DeterministicPolicy {
    int horizon = 0;
    int num_states = 0;
    std::vector<int> actions;

    DeterministicPolicy() = default;
    DeterministicPolicy(int H, int S)
        : horizon(H), num_states(S), actions(static_cast<std::size_t>(H) * S, 0) {}

    std::size_t index(int h, int s) const {
        return static_cast<std::size_t>(h) * num_states + s;
    }
    int at(int h, int s) const { return actions[index(h, s)]; }
    int& at(int h, int s) { return actions[index(h, s)]; }

    bool operator==(const DeterministicPolicy&) const = default;
};

/// Finite episodic MDP with a fixed horizon, a deterministic initial state,
/// per-stage transition kernels and mean rewards in [0, 1]. Rewards may carry
/// bounded uniform noise (per-triple half-width); means plus or minus the
/// half-width must stay inside [0, 1], so realized rewards never need
/// clamping.
///
/// Stages are 0-based: 0..H-1. The final stage has rewards but no outgoing
/// kernel. Transition rows are validated to sum to 1 within 1e-12 and then
/// renormalized so each row sums to exactly 1.0 in double arithmetic.
class EpisodicMdp {
public:
    /// transitions: (H-1)*S*A*S row-major, rewards: H*S*A, reward_noise:
    /// H*S*A or empty for deterministic rewards. Throws std::invalid_argument
    /// on any malformed input.
    EpisodicMdp(int horizon, int num_states, int num_actions, int initial_state,
                std::vector<double> transitions, std::vector<double> rewards,
                std::vector<double> reward_noise = {});

    int horizon() const { return horizon_; }
    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int initial_state() const { return initial_state_; }
    bool has_reward_noise() const { return !noise_.empty(); }

    /// Probability row over successor states for (h, s, a); h must be below
    /// horizon()-1 (the final stage has no kernel).
    std::span<const double> transition_row(int h, int s, int a) const;

    double mean_reward(int h, int s, int a) const { return rewards_[sa_index(h, s, a)]; }
    double noise_half_width(int h, int s, int a) const {
        return noise_.empty() ? 0.0 : noise_[sa_index(h, s, a)];
    }

    nlohmann::json to_json() const;
    static EpisodicMdp from_json(const nlohmann::json& j);

    std::size_t sa_index(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * num_states_ + s) * num_actions_ + a;
    }

private:
    int horizon_;
    int num_states_;
    int num_actions_;
    int initial_state_;
    std::vector<double> transitions_;
    std::vector<double> rewards_;
    std::vector<double> noise_;
};

/// Exact Q*/V* by backward induction. Deterministic: identical inputs give
/// bit-identical tables.
std::pair<QTables, VTables> backward_induction(const EpisodicMdp& mdp);

/// Exact V^pi by backward policy evaluation. Throws on out-of-range actions.
VTables policy_value(const EpisodicMdp& mdp, const DeterministicPolicy& pi);

/// Stage-wise argmax with lowest-action-index tie-breaking.
DeterministicPolicy greedy_policy(const QTables& q);

/// Realized reward at (h, s, a): mean plus a uniform draw in [-w, +w] when the
/// half-width w is positive, the exact mean otherwise.
double sample_reward(const EpisodicMdp& mdp, int h, int s, int a, Rng& rng);

/// Draws (reward, next state) for a non-final stage. Throws if h is the final
/// stage, which has no successor.
std::pair<int, double> sample_transition(const EpisodicMdp& mdp, int h, int s, int a, Rng& rng);

struct EnumerationResult {
    double best_value = 0.0;  // at the initial state, stage 0
    DeterministicPolicy best_policy;
};

/// Exhaustive search over all A^(S*H) deterministic policies; brute-force
/// oracle for backward_induction on tiny instances. Throws when the policy
/// count exceeds the cap. Ties keep the first policy in odometer order.
EnumerationResult enumerate_policies(const EpisodicMdp& mdp,
                                     std::uint64_t policy_cap = 1'000'000);

}  // namespace aqucb
