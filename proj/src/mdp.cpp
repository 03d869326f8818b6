#include "aqucb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aqucb {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string triple(int h, int s, int a) {
    return "(h=" + std::to_string(h) + ", s=" + std::to_string(s) +
           ", a=" + std::to_string(a) + ")";
}

/// Scales a probability row so it sums to exactly 1.0, absorbing the residual
/// rounding into the largest entry.
void normalize_row(std::span<double> row) {
    double sum = 0.0;
    for (double p : row) sum += p;
    for (double& p : row) p /= sum;
    double new_sum = 0.0;
    for (double p : row) new_sum += p;
    auto largest = std::max_element(row.begin(), row.end());
    *largest += 1.0 - new_sum;
}

}  // namespace

EpisodicMdp::EpisodicMdp(int horizon, int num_states, int num_actions, int initial_state,
                         std::vector<double> transitions, std::vector<double> rewards,
                         std::vector<double> reward_noise)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      initial_state_(initial_state),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      noise_(std::move(reward_noise)) {
    if (horizon_ < 1) throw std::invalid_argument("EpisodicMdp: horizon must be positive");
    if (num_states_ < 1) throw std::invalid_argument("EpisodicMdp: num_states must be positive");
    if (num_actions_ < 1) throw std::invalid_argument("EpisodicMdp: num_actions must be positive");
    if (initial_state_ < 0 || initial_state_ >= num_states_)
        throw std::invalid_argument("EpisodicMdp: initial_state out of range");

    const std::size_t sa = static_cast<std::size_t>(horizon_) * num_states_ * num_actions_;
    const std::size_t kernel =
        static_cast<std::size_t>(horizon_ - 1) * num_states_ * num_actions_ * num_states_;
    if (transitions_.size() != kernel)
        throw std::invalid_argument("EpisodicMdp: transitions has wrong size");
    if (rewards_.size() != sa) throw std::invalid_argument("EpisodicMdp: rewards has wrong size");
    if (!noise_.empty() && noise_.size() != sa)
        throw std::invalid_argument("EpisodicMdp: reward_noise has wrong size");

    for (int h = 0; h + 1 < horizon_; ++h) {
        for (int s = 0; s < num_states_; ++s) {
            for (int a = 0; a < num_actions_; ++a) {
                std::span<double> row{transitions_.data() + sa_index(h, s, a) * num_states_,
                                      static_cast<std::size_t>(num_states_)};
                double sum = 0.0;
                for (double p : row) {
                    if (p < 0.0)
                        throw std::invalid_argument("EpisodicMdp: negative transition probability at " +
                                                    triple(h, s, a));
                    sum += p;
                }
                if (std::abs(sum - 1.0) > kRowSumTolerance)
                    throw std::invalid_argument("EpisodicMdp: transition row at " + triple(h, s, a) +
                                                " sums to " + std::to_string(sum));
                normalize_row(row);
            }
        }
    }

    for (int h = 0; h < horizon_; ++h) {
        for (int s = 0; s < num_states_; ++s) {
            for (int a = 0; a < num_actions_; ++a) {
                const double r = rewards_[sa_index(h, s, a)];
                if (r < 0.0 || r > 1.0)
                    throw std::invalid_argument("EpisodicMdp: mean reward outside [0,1] at " +
                                                triple(h, s, a));
                const double w = noise_half_width(h, s, a);
                if (w < 0.0)
                    throw std::invalid_argument("EpisodicMdp: negative noise half-width at " +
                                                triple(h, s, a));
                if (r - w < 0.0 || r + w > 1.0)
                    throw std::invalid_argument(
                        "EpisodicMdp: mean +- noise half-width leaves [0,1] at " + triple(h, s, a));
            }
        }
    }
}

std::span<const double> EpisodicMdp::transition_row(int h, int s, int a) const {
    if (h < 0 || h + 1 >= horizon_)
        throw std::invalid_argument("EpisodicMdp::transition_row: stage " + std::to_string(h) +
                                    " has no outgoing kernel");
    return {transitions_.data() + sa_index(h, s, a) * num_states_,
            static_cast<std::size_t>(num_states_)};
}

nlohmann::json EpisodicMdp::to_json() const {
    nlohmann::json j;
    j["horizon"] = horizon_;
    j["num_states"] = num_states_;
    j["num_actions"] = num_actions_;
    j["initial_state"] = initial_state_;
    auto transitions = nlohmann::json::array();
    for (int h = 0; h + 1 < horizon_; ++h) {
        auto stage = nlohmann::json::array();
        for (int s = 0; s < num_states_; ++s) {
            auto per_state = nlohmann::json::array();
            for (int a = 0; a < num_actions_; ++a) {
                auto row = transition_row(h, s, a);
                per_state.push_back(std::vector<double>(row.begin(), row.end()));
            }
            stage.push_back(std::move(per_state));
        }
        transitions.push_back(std::move(stage));
    }
    j["transitions"] = std::move(transitions);
    auto rewards = nlohmann::json::array();
    for (int h = 0; h < horizon_; ++h) {
        auto stage = nlohmann::json::array();
        for (int s = 0; s < num_states_; ++s) {
            auto per_state = nlohmann::json::array();
            for (int a = 0; a < num_actions_; ++a) per_state.push_back(mean_reward(h, s, a));
            stage.push_back(std::move(per_state));
        }
        rewards.push_back(std::move(stage));
    }
    j["rewards"] = std::move(rewards);
    if (!noise_.empty()) {
        auto noise = nlohmann::json::array();
        for (int h = 0; h < horizon_; ++h) {
            auto stage = nlohmann::json::array();
            for (int s = 0; s < num_states_; ++s) {
                auto per_state = nlohmann::json::array();
                for (int a = 0; a < num_actions_; ++a)
                    per_state.push_back(noise_half_width(h, s, a));
                stage.push_back(std::move(per_state));
            }
            noise.push_back(std::move(stage));
        }
        j["reward_noise"] = std::move(noise);
    }
    return j;
}

EpisodicMdp EpisodicMdp::from_json(const nlohmann::json& j) {
    const int H = j.at("horizon").get<int>();
    const int S = j.at("num_states").get<int>();
    const int A = j.at("num_actions").get<int>();
    const int s1 = j.at("initial_state").get<int>();
    if (H < 1 || S < 1 || A < 1)
        throw std::invalid_argument("EpisodicMdp::from_json: bad dimensions");

    std::vector<double> transitions;
    transitions.reserve(static_cast<std::size_t>(H - 1) * S * A * S);
    const auto& jt = j.at("transitions");
    if (static_cast<int>(jt.size()) != H - 1)
        throw std::invalid_argument("EpisodicMdp::from_json: transitions stage count mismatch");
    for (const auto& stage : jt)
        for (const auto& per_state : stage)
            for (const auto& row : per_state)
                for (const auto& p : row) transitions.push_back(p.get<double>());

    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(H) * S * A);
    for (const auto& stage : j.at("rewards"))
        for (const auto& per_state : stage)
            for (const auto& r : per_state) rewards.push_back(r.get<double>());

    std::vector<double> noise;
    if (j.contains("reward_noise")) {
        for (const auto& stage : j.at("reward_noise"))
            for (const auto& per_state : stage)
                for (const auto& w : per_state) noise.push_back(w.get<double>());
    }
    return EpisodicMdp(H, S, A, s1, std::move(transitions), std::move(rewards), std::move(noise));
}

std::pair<QTables, VTables> backward_induction(const EpisodicMdp& mdp) {
    const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
    QTables q(H, S, A);
    VTables v(H, S);
    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
            double best = 0.0;
            for (int a = 0; a < A; ++a) {
                double continuation = 0.0;
                if (h + 1 < H) {
                    auto row = mdp.transition_row(h, s, a);
                    for (int sn = 0; sn < S; ++sn) continuation += row[sn] * v.at(h + 1, sn);
                }
                const double qv = mdp.mean_reward(h, s, a) + continuation;
                q.at(h, s, a) = qv;
                if (a == 0 || qv > best) best = qv;
            }
            v.at(h, s) = best;
        }
    }
    return {std::move(q), std::move(v)};
}

VTables policy_value(const EpisodicMdp& mdp, const DeterministicPolicy& pi) {
    const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
    if (pi.horizon != H || pi.num_states != S)
        throw std::invalid_argument("policy_value: policy dimensions do not match the MDP");
    VTables v(H, S);
    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
            const int a = pi.at(h, s);
            if (a < 0 || a >= A)
                throw std::invalid_argument("policy_value: invalid action index at " +
                                            std::to_string(h) + "," + std::to_string(s));
            double continuation = 0.0;
            if (h + 1 < H) {
                auto row = mdp.transition_row(h, s, a);
                for (int sn = 0; sn < S; ++sn) continuation += row[sn] * v.at(h + 1, sn);
            }
            v.at(h, s) = mdp.mean_reward(h, s, a) + continuation;
        }
    }
    return v;
}

DeterministicPolicy greedy_policy(const QTables& q) {
    DeterministicPolicy pi(q.horizon, q.num_states);
    for (int h = 0; h < q.horizon; ++h) {
        for (int s = 0; s < q.num_states; ++s) {
            int best = 0;
            for (int a = 1; a < q.num_actions; ++a)
                if (q.at(h, s, a) > q.at(h, s, best)) best = a;
            pi.at(h, s) = best;
        }
    }
    return pi;
}

double sample_reward(const EpisodicMdp& mdp, int h, int s, int a, Rng& rng) {
    const double mean = mdp.mean_reward(h, s, a);
    const double w = mdp.noise_half_width(h, s, a);
    return w > 0.0 ? mean + rng.uniform(-w, w) : mean;
}

std::pair<int, double> sample_transition(const EpisodicMdp& mdp, int h, int s, int a, Rng& rng) {
    const double reward = sample_reward(mdp, h, s, a, rng);
    const int next = rng.categorical(mdp.transition_row(h, s, a));
    return {next, reward};
}

EnumerationResult enumerate_policies(const EpisodicMdp& mdp, std::uint64_t policy_cap) {
    const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
    const std::size_t digits = static_cast<std::size_t>(H) * S;
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < digits; ++i) {
        if (count > policy_cap / static_cast<std::uint64_t>(A))
            throw std::invalid_argument("enumerate_policies: A^(S*H) exceeds the policy cap");
        count *= static_cast<std::uint64_t>(A);
    }

    EnumerationResult result;
    DeterministicPolicy pi(H, S);
    bool first = true;
    while (true) {
        const VTables v = policy_value(mdp, pi);
        const double value = v.at(0, mdp.initial_state());
        if (first || value > result.best_value) {
            result.best_value = value;
            result.best_policy = pi;
            first = false;
        }
        // odometer increment, digit (h, s) = h*S + s, lowest digit fastest
        std::size_t d = 0;
        for (; d < digits; ++d) {
            if (++pi.actions[d] < A) break;
            pi.actions[d] = 0;
        }
        if (d == digits) break;
    }
    return result;
}

}  // namespace aqucb
