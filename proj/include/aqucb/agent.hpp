#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"

#include "aqucb/aggregation.hpp"
#include "aqucb/mdp.hpp"
#include "aqucb/rng.hpp"

namespace aqucb {

/// One episode: (state, action, reward) per stage. states[h+1] is the
/// successor of (states[h], actions[h]); the final stage has none.
struct Trajectory {
    std::vector<int> states;
    std::vector<int> actions;
    std::vector<double> rewards;

    int horizon() const { return static_cast<int>(states.size()); }
};

/// Stepsize (H+1)/(H+t) for the t-th visit, t >= 1.
double alpha(long long t, int horizon);

/// Effective weights the running estimate places on past targets after t
/// visits: entry 0 is the weight on the initial value, entry i >= 1 the
/// weight on the i-th target. Returns t+1 entries summing to 1; entry 0 is
/// exactly 0 for t >= 1.
std::vector<double> alpha_weights(long long t, int horizon);

/// Per-visit optimism boost taken as a function of the visit count.
using BonusFn = std::function<double(long long visit_count)>;

/// The bonus schedule beta_i = 2 H^{3/2} sqrt(log(HK/delta)) + epsilon sqrt(i).
/// K is the episode budget, fixed in advance; delta the failure probability;
/// epsilon the aggregation error the schedule compensates for.
class BonusSchedule {
public:
    BonusSchedule(int horizon, long long episodes, double delta, double epsilon);

    double beta(long long i) const;
    /// The i-independent part, 2 H^{3/2} sqrt(log(HK/delta)).
    double base() const { return base_; }

    int horizon() const { return horizon_; }
    long long episodes() const { return episodes_; }
    double delta() const { return delta_; }
    double epsilon() const { return epsilon_; }

    BonusFn as_fn() const;

private:
    int horizon_;
    long long episodes_;
    double delta_;
    double epsilon_;
    double base_;
};

/// The all-zero bonus used by the greedy SARSA baseline.
BonusFn zero_bonus();

/// The learner's memory: one optimistic Q estimate and one visit counter per
/// (stage, cell). Estimates start at H (stage values can never exceed it) and
/// are capped back to H after every update. A virtual terminal stage held at
/// zero backs the value read at the final stage.
class AgentState {
public:
    AgentState(int horizon, int num_cells);

    int horizon() const { return horizon_; }
    int num_cells() const { return num_cells_; }
    long long episode_index() const { return episode_index_; }

    double q_hat(int h, int m) const { return q_hat_[cell_index(h, m)]; }
    long long visits(int h, int m) const { return visits_[cell_index(h, m)]; }

    /// max_a Q̂_stage(cell(stage, s, a)); zero at the virtual terminal stage.
    double value_estimate(const Aggregation& agg, int stage, int s) const;

    /// Processes one trajectory, stage by stage in increasing order: bump the
    /// visited cell's counter, form the target r + V̂_next + beta/sqrt(N) with
    /// V̂_next read from the estimates as they were before this episode's pass
    /// (increasing-stage in-place updates preserve that, since a stage's
    /// update never touches the next stage), blend it in with stepsize
    /// alpha_N, and cap at H.
    void update_from_trajectory(const Trajectory& traj, const Aggregation& agg,
                                const BonusFn& bonus);

    nlohmann::json snapshot() const;
    static AgentState from_snapshot(const nlohmann::json& j);

private:
    std::size_t cell_index(int h, int m) const {
        return static_cast<std::size_t>(h) * num_cells_ + m;
    }

    int horizon_;
    int num_cells_;
    long long episode_index_;
    std::vector<double> q_hat_;     // (horizon+1) x cells, last row pinned at 0
    std::vector<long long> visits_;  // horizon x cells
};

/// Greedy trajectory from the initial state under the current estimates,
/// lowest action index on ties.
Trajectory rollout(const AgentState& state, const EpisodicMdp& mdp, const Aggregation& agg,
                   Rng& rng);

/// Uniformly random actions at every stage; seeds the very first update.
Trajectory initial_trajectory(const EpisodicMdp& mdp, Rng& rng);

/// The raw-state greedy policy induced by the aggregate estimates:
/// pi(h, s) = argmax_a Q̂_h(cell(h, s, a)), lowest index on ties.
DeterministicPolicy induced_greedy_policy(const AgentState& state, const Aggregation& agg);

struct RunResult {
    std::vector<Trajectory> trajectories;  // K+1 entries, index 0 is the random draw
    AgentState final_state;
    DeterministicPolicy final_policy;
};

/// Callback invoked after each episode k = 1..K with the post-update state and
/// the trajectory just rolled out under it.
using EpisodeObserver =
    std::function<void(long long k, const AgentState& state, const Trajectory& traj)>;

/// The full learning loop with an arbitrary bonus: draw a random trajectory,
/// then K times (update from the previous trajectory; roll out greedily).
/// Bit-reproducible for a fixed seed.
RunResult run_with_bonus(const EpisodicMdp& mdp, const Aggregation& agg, const BonusFn& bonus,
                         long long episodes, std::uint64_t seed,
                         const EpisodeObserver& observer = {}, bool keep_trajectories = true);

RunResult run_aqucb(const EpisodicMdp& mdp, const Aggregation& agg, const BonusSchedule& sched,
                    long long episodes, std::uint64_t seed,
                    const EpisodeObserver& observer = {}, bool keep_trajectories = true);

/// AQ-UCB with the bonus identically zero.
RunResult baseline_greedy_sarsa(const EpisodicMdp& mdp, const Aggregation& agg,
                                long long episodes, std::uint64_t seed,
                                const EpisodeObserver& observer = {},
                                bool keep_trajectories = true);

}  // namespace aqucb
