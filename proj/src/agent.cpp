#include "aqucb/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aqucb {

double alpha(long long t, int horizon) {
    if (t < 1) throw std::invalid_argument("alpha: t must be at least 1");
    return static_cast<double>(horizon + 1) / static_cast<double>(horizon + t);
}

std::vector<double> alpha_weights(long long t, int horizon) {
    // w[i] = alpha_i * prod_{j=i+1..t} (1 - alpha_j), built from the suffix
    // products so the whole vector costs O(t).
    std::vector<double> w(static_cast<std::size_t>(t) + 1);
    double suffix = 1.0;  // prod_{j=i+1..t} (1 - alpha_j), shrinking i from t
    for (long long i = t; i >= 1; --i) {
        w[static_cast<std::size_t>(i)] = alpha(i, horizon) * suffix;
        suffix *= 1.0 - alpha(i, horizon);
    }
    w[0] = suffix;  // prod_{j=1..t} (1 - alpha_j); zero for t >= 1 since alpha_1 = 1
    return w;
}

BonusSchedule::BonusSchedule(int horizon, long long episodes, double delta, double epsilon)
    : horizon_(horizon), episodes_(episodes), delta_(delta), epsilon_(epsilon) {
    if (horizon_ < 1) throw std::invalid_argument("BonusSchedule: horizon must be positive");
    if (episodes_ < 1) throw std::invalid_argument("BonusSchedule: episode budget must be >= 1");
    if (!(delta_ > 0.0 && delta_ < 1.0))
        throw std::invalid_argument("BonusSchedule: delta must lie in (0,1)");
    if (epsilon_ < 0.0) throw std::invalid_argument("BonusSchedule: epsilon must be >= 0");
    const double log_arg =
        static_cast<double>(horizon_) * static_cast<double>(episodes_) / delta_;
    if (log_arg <= 1.0)
        throw std::invalid_argument("BonusSchedule: HK/delta must exceed 1");
    base_ = 2.0 * std::pow(static_cast<double>(horizon_), 1.5) * std::sqrt(std::log(log_arg));
}

double BonusSchedule::beta(long long i) const {
    if (i < 1) throw std::invalid_argument("BonusSchedule::beta: visit index must be >= 1");
    return base_ + epsilon_ * std::sqrt(static_cast<double>(i));
}

BonusFn BonusSchedule::as_fn() const {
    return [sched = *this](long long i) { return sched.beta(i); };
}

BonusFn zero_bonus() {
    return [](long long) { return 0.0; };
}

AgentState::AgentState(int horizon, int num_cells)
    : horizon_(horizon),
      num_cells_(num_cells),
      episode_index_(0),
      q_hat_(static_cast<std::size_t>(horizon + 1) * num_cells, 0.0),
      visits_(static_cast<std::size_t>(horizon) * num_cells, 0) {
    if (horizon_ < 1) throw std::invalid_argument("AgentState: horizon must be positive");
    if (num_cells_ < 1) throw std::invalid_argument("AgentState: num_cells must be positive");
    std::fill(q_hat_.begin(), q_hat_.begin() + static_cast<std::size_t>(horizon_) * num_cells_,
              static_cast<double>(horizon_));
}

double AgentState::value_estimate(const Aggregation& agg, int stage, int s) const {
    if (stage == horizon_) return q_hat_[cell_index(horizon_, 0)];  // virtual stage, always 0
    double best = q_hat(stage, agg.cell(stage, s, 0));
    for (int a = 1; a < agg.num_actions; ++a)
        best = std::max(best, q_hat(stage, agg.cell(stage, s, a)));
    return best;
}

void AgentState::update_from_trajectory(const Trajectory& traj, const Aggregation& agg,
                                        const BonusFn& bonus) {
    if (traj.horizon() != horizon_)
        throw std::invalid_argument("update_from_trajectory: trajectory stage count mismatch");
    if (agg.horizon != horizon_ || agg.num_cells != num_cells_)
        throw std::invalid_argument("update_from_trajectory: aggregation dimension mismatch");

    const double cap = static_cast<double>(horizon_);
    for (int h = 0; h < horizon_; ++h) {
        const int m = agg.cell(h, traj.states[h], traj.actions[h]);
        const long long n = ++visits_[static_cast<std::size_t>(h) * num_cells_ + m];
        const double v_next =
            h + 1 < horizon_ ? value_estimate(agg, h + 1, traj.states[h + 1]) : 0.0;
        const double step = alpha(n, horizon_);
        const double target = traj.rewards[h] + v_next + bonus(n) / std::sqrt(static_cast<double>(n));
        double& q = q_hat_[cell_index(h, m)];
        q = std::min((1.0 - step) * q + step * target, cap);
    }
    ++episode_index_;
}

nlohmann::json AgentState::snapshot() const {
    nlohmann::json j;
    j["H"] = horizon_;
    j["M"] = num_cells_;
    auto q = nlohmann::json::array();
    auto n = nlohmann::json::array();
    for (int h = 0; h < horizon_; ++h) {
        auto qrow = nlohmann::json::array();
        auto nrow = nlohmann::json::array();
        for (int m = 0; m < num_cells_; ++m) {
            qrow.push_back(q_hat(h, m));
            nrow.push_back(visits(h, m));
        }
        q.push_back(std::move(qrow));
        n.push_back(std::move(nrow));
    }
    j["q_hat"] = std::move(q);
    j["visits"] = std::move(n);
    j["episode_index"] = episode_index_;
    return j;
}

AgentState AgentState::from_snapshot(const nlohmann::json& j) {
    AgentState state(j.at("H").get<int>(), j.at("M").get<int>());
    for (int h = 0; h < state.horizon_; ++h) {
        for (int m = 0; m < state.num_cells_; ++m) {
            state.q_hat_[state.cell_index(h, m)] = j.at("q_hat").at(h).at(m).get<double>();
            state.visits_[static_cast<std::size_t>(h) * state.num_cells_ + m] =
                j.at("visits").at(h).at(m).get<long long>();
        }
    }
    state.episode_index_ = j.at("episode_index").get<long long>();
    return state;
}

namespace {

int greedy_action(const AgentState& state, const Aggregation& agg, int h, int s) {
    int best = 0;
    double best_q = state.q_hat(h, agg.cell(h, s, 0));
    for (int a = 1; a < agg.num_actions; ++a) {
        const double q = state.q_hat(h, agg.cell(h, s, a));
        if (q > best_q) {
            best_q = q;
            best = a;
        }
    }
    return best;
}

}  // namespace

Trajectory rollout(const AgentState& state, const EpisodicMdp& mdp, const Aggregation& agg,
                   Rng& rng) {
    const int H = mdp.horizon();
    Trajectory traj;
    traj.states.resize(H);
    traj.actions.resize(H);
    traj.rewards.resize(H);
    int s = mdp.initial_state();
    for (int h = 0; h < H; ++h) {
        traj.states[h] = s;
        const int a = greedy_action(state, agg, h, s);
        traj.actions[h] = a;
        if (h + 1 < H) {
            auto [next, reward] = sample_transition(mdp, h, s, a, rng);
            traj.rewards[h] = reward;
            s = next;
        } else {
            traj.rewards[h] = sample_reward(mdp, h, s, a, rng);
        }
    }
    return traj;
}

Trajectory initial_trajectory(const EpisodicMdp& mdp, Rng& rng) {
    const int H = mdp.horizon();
    Trajectory traj;
    traj.states.resize(H);
    traj.actions.resize(H);
    traj.rewards.resize(H);
    int s = mdp.initial_state();
    for (int h = 0; h < H; ++h) {
        traj.states[h] = s;
        const int a = rng.uniform_int(mdp.num_actions());
        traj.actions[h] = a;
        if (h + 1 < H) {
            auto [next, reward] = sample_transition(mdp, h, s, a, rng);
            traj.rewards[h] = reward;
            s = next;
        } else {
            traj.rewards[h] = sample_reward(mdp, h, s, a, rng);
        }
    }
    return traj;
}

DeterministicPolicy induced_greedy_policy(const AgentState& state, const Aggregation& agg) {
    DeterministicPolicy pi(agg.horizon, agg.num_states);
    for (int h = 0; h < agg.horizon; ++h)
        for (int s = 0; s < agg.num_states; ++s) pi.at(h, s) = greedy_action(state, agg, h, s);
    return pi;
}

RunResult run_with_bonus(const EpisodicMdp& mdp, const Aggregation& agg, const BonusFn& bonus,
                         long long episodes, std::uint64_t seed,
                         const EpisodeObserver& observer, bool keep_trajectories) {
    validate(agg, mdp);
    if (episodes < 0) throw std::invalid_argument("run_with_bonus: negative episode count");

    AgentState state(mdp.horizon(), agg.num_cells);
    Rng rng(seed);

    RunResult result{.trajectories = {}, .final_state = state, .final_policy = {}};
    Trajectory previous = initial_trajectory(mdp, rng);
    if (keep_trajectories) {
        result.trajectories.reserve(static_cast<std::size_t>(episodes) + 1);
        result.trajectories.push_back(previous);
    }

    for (long long k = 1; k <= episodes; ++k) {
        state.update_from_trajectory(previous, agg, bonus);
        previous = rollout(state, mdp, agg, rng);
        if (observer) observer(k, state, previous);
        if (keep_trajectories) result.trajectories.push_back(previous);
    }

    result.final_state = state;
    result.final_policy = induced_greedy_policy(state, agg);
    return result;
}

RunResult run_aqucb(const EpisodicMdp& mdp, const Aggregation& agg, const BonusSchedule& sched,
                    long long episodes, std::uint64_t seed, const EpisodeObserver& observer,
                    bool keep_trajectories) {
    if (sched.horizon() != mdp.horizon())
        throw std::invalid_argument("run_aqucb: schedule horizon does not match the MDP");
    return run_with_bonus(mdp, agg, sched.as_fn(), episodes, seed, observer, keep_trajectories);
}

RunResult baseline_greedy_sarsa(const EpisodicMdp& mdp, const Aggregation& agg,
                                long long episodes, std::uint64_t seed,
                                const EpisodeObserver& observer, bool keep_trajectories) {
    return run_with_bonus(mdp, agg, zero_bonus(), episodes, seed, observer, keep_trajectories);
}

}  // namespace aqucb
