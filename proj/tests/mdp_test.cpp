#include "doctest.h"

#include <cmath>
#include <vector>

#include "aqucb/env_suite.hpp"
#include "aqucb/mdp.hpp"

#include "oracles.hpp"

using namespace aqucb;

namespace {

// Two-state, two-action, H=2 deterministic chain solved by hand.
// Transitions at stage 1: (s,a=0) -> s0, (s,a=1) -> s1 for both s.
// Stage-1 rewards [[0.1, 0.6], [0.3, 0.9]], stage-2 rewards [[0.8, 0.2], [0.5, 0.7]].
// Hand backup: V*_2 = [0.8, 0.7];
//   Q*_1(0,·) = [0.1+0.8, 0.6+0.7] = [0.9, 1.3]
//   Q*_1(1,·) = [0.3+0.8, 0.9+0.7] = [1.1, 1.6]
//   V*_1 = [1.3, 1.6]; optimal actions: stage 1 -> (1,1), stage 2 -> (0,1).
EpisodicMdp hand_chain() {
    std::vector<double> transitions = {1, 0, 0, 1,   // h=0, s=0, a=0/1
                                       1, 0, 0, 1};  // h=0, s=1, a=0/1
    std::vector<double> rewards = {0.1, 0.6, 0.3, 0.9,   // stage 1
                                   0.8, 0.2, 0.5, 0.7};  // stage 2
    return EpisodicMdp(2, 2, 2, 0, transitions, rewards);
}

}  // namespace

TEST_CASE("single-stage MDP solves to its reward table") {
    std::vector<double> rewards = {0.2, 0.7, 0.5, 0.1, 0.9, 0.4};
    EpisodicMdp mdp(1, 2, 3, 1, {}, rewards);
    const auto [q, v] = backward_induction(mdp);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 3; ++a) CHECK(q.at(0, s, a) == rewards[s * 3 + a]);
    CHECK(v.at(0, 0) == 0.7);
    CHECK(v.at(0, 1) == 0.9);
    // virtual terminal stage stays zero
    for (int s = 0; s < 2; ++s) {
        CHECK(v.at(1, s) == 0.0);
        for (int a = 0; a < 3; ++a) CHECK(q.at(1, s, a) == 0.0);
    }
}

TEST_CASE("backward induction matches the hand-solved two-stage chain") {
    const auto mdp = hand_chain();
    const auto [q, v] = backward_induction(mdp);
    CHECK(q.at(0, 0, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(q.at(0, 0, 1) == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(q.at(0, 1, 0) == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(q.at(0, 1, 1) == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(v.at(0, 0) == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(v.at(0, 1) == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(v.at(1, 0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(v.at(1, 1) == doctest::Approx(0.7).epsilon(1e-12));

    const auto pi = greedy_policy(q);
    CHECK(pi.at(0, 0) == 1);
    CHECK(pi.at(0, 1) == 1);
    CHECK(pi.at(1, 0) == 0);
    CHECK(pi.at(1, 1) == 1);
}

TEST_CASE("backward induction matches exhaustive policy enumeration") {
    for (std::uint64_t seed : {7, 8, 9, 10}) {
        const auto mdp = random_mdp(3, 3, 2, 0.0, seed);
        const auto [q, v] = backward_induction(mdp);
        const auto best = enumerate_policies(mdp);
        CHECK(std::abs(v.at(0, mdp.initial_state()) - best.best_value) <= 1e-10);
    }
}

TEST_CASE("policy evaluation: the greedy policy attains V*") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto mdp = random_mdp(4, 5, 3, 0.3, seed);
        const auto [q, v] = backward_induction(mdp);
        const auto v_pi = policy_value(mdp, greedy_policy(q));
        for (int h = 0; h < mdp.horizon(); ++h)
            for (int s = 0; s < mdp.num_states(); ++s)
                CHECK(std::abs(v_pi.at(h, s) - v.at(h, s)) <= 1e-10);
    }
}

TEST_CASE("policy evaluation on a single stage reads the reward row") {
    std::vector<double> rewards = {0.2, 0.7, 0.5, 0.1};
    EpisodicMdp mdp(1, 2, 2, 0, {}, rewards);
    DeterministicPolicy pi(1, 2);
    pi.at(0, 0) = 1;
    pi.at(0, 1) = 0;
    const auto v = policy_value(mdp, pi);
    CHECK(v.at(0, 0) == 0.7);
    CHECK(v.at(0, 1) == 0.5);
}

TEST_CASE("policy evaluation matches a Monte Carlo oracle") {
    auto mdp = with_rewards_rescaled(random_mdp(3, 3, 2, 0.0, 42), 0.2, 0.8);
    {
        // attach stochastic rewards: constant half-width 0.1
        nlohmann::json j = mdp.to_json();
        std::vector<std::vector<std::vector<double>>> noise(
            3, std::vector<std::vector<double>>(3, std::vector<double>(2, 0.1)));
        j["reward_noise"] = noise;
        mdp = EpisodicMdp::from_json(j);
    }
    DeterministicPolicy pi(3, 3);
    pi.at(0, 0) = 1;
    pi.at(1, 2) = 1;
    pi.at(2, 1) = 1;
    const double exact = policy_value(mdp, pi).at(0, mdp.initial_state());
    const auto mc = aqucb::test::mc_policy_value(mdp, pi, 1'000'000, 99);
    CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.std_error);
}

TEST_CASE("policy evaluation rejects out-of-range actions") {
    const auto mdp = hand_chain();
    DeterministicPolicy pi(2, 2);
    pi.at(1, 1) = 5;
    CHECK_THROWS_AS(policy_value(mdp, pi), std::invalid_argument);
}

TEST_CASE("greedy policy tie-breaks to the lowest action index") {
    QTables q(2, 2, 3);
    for (int h = 0; h < 2; ++h)
        for (int s = 0; s < 2; ++s)
            for (int a = 0; a < 3; ++a) q.at(h, s, a) = 0.5;
    const auto pi = greedy_policy(q);
    for (int h = 0; h < 2; ++h)
        for (int s = 0; s < 2; ++s) CHECK(pi.at(h, s) == 0);

    q.at(1, 0, 2) = 0.9;
    CHECK(greedy_policy(q).at(1, 0) == 2);
}

TEST_CASE("sampling: deterministic kernel row always yields its successor") {
    const auto mdp = hand_chain();
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto [next, reward] = sample_transition(mdp, 0, 0, 1, rng);
        CHECK(next == 1);
        CHECK(reward == 0.6);  // zero half-width: reward is exactly the mean
    }
}

TEST_CASE("sampling: uniform row frequencies within three sigma") {
    const int S = 4;
    std::vector<double> transitions(S * 1 * S, 0.25);
    std::vector<double> rewards(2 * S * 1, 0.0);
    EpisodicMdp mdp(2, S, 1, 0, transitions, rewards);
    Rng rng(123);
    const int n = 100'000;
    std::vector<int> counts(S, 0);
    for (int i = 0; i < n; ++i) ++counts[sample_transition(mdp, 0, 2, 0, rng).first];
    const double sigma = std::sqrt(0.25 * 0.75 / n);
    for (int s = 0; s < S; ++s)
        CHECK(std::abs(counts[s] / static_cast<double>(n) - 0.25) <= 3.0 * sigma);
}

TEST_CASE("sampling: the final stage has no successor") {
    const auto mdp = hand_chain();
    Rng rng(1);
    CHECK_THROWS_AS(sample_transition(mdp, 1, 0, 0, rng), std::invalid_argument);
    CHECK(sample_reward(mdp, 1, 0, 0, rng) == 0.8);
}

TEST_CASE("sampling is reproducible per seed") {
    const auto mdp = random_mdp(3, 4, 2, 0.0, 17);
    Rng a(2024), b(2024);
    for (int i = 0; i < 50; ++i) {
        const auto ra = sample_transition(mdp, 0, 1, 1, a);
        const auto rb = sample_transition(mdp, 0, 1, 1, b);
        CHECK(ra.first == rb.first);
        CHECK(ra.second == rb.second);
    }
}

TEST_CASE("enumeration: a single action leaves a single policy") {
    const auto mdp = random_mdp(3, 3, 1, 0.0, 4);
    const auto best = enumerate_policies(mdp);
    DeterministicPolicy only(3, 3);
    CHECK(best.best_policy == only);
    CHECK(best.best_value == doctest::Approx(policy_value(mdp, only).at(0, 0)).epsilon(1e-12));
}

TEST_CASE("enumeration: strictly dominant actions are recovered exactly") {
    // action 1 carries a reward margin of 0.1 everywhere and the kernel is
    // action-independent, so action 1 is optimal at every (h, s)
    const int H = 2, S = 2, A = 2;
    std::vector<double> transitions = {0.5, 0.5, 0.5, 0.5, 0.3, 0.7, 0.3, 0.7};
    std::vector<double> rewards;
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            rewards.push_back(0.2 + 0.1 * h + 0.05 * s);
            rewards.push_back(0.2 + 0.1 * h + 0.05 * s + 0.1);
        }
    EpisodicMdp mdp(H, S, A, 0, transitions, rewards);
    const auto best = enumerate_policies(mdp);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) CHECK(best.best_policy.at(h, s) == 1);
}

TEST_CASE("enumeration refuses oversized policy spaces") {
    const auto mdp = random_mdp(4, 4, 3, 0.0, 11);  // 3^16 policies
    CHECK_THROWS_AS(enumerate_policies(mdp), std::invalid_argument);
}

TEST_CASE("value bounds: 0 <= V^pi <= V* <= H - h") {
    Rng action_rng(31);
    for (std::uint64_t seed : {21, 22, 23}) {
        const auto mdp = random_mdp(4, 4, 2, 0.2, seed);
        const auto [q, v] = backward_induction(mdp);
        DeterministicPolicy pi(4, 4);
        for (auto& a : pi.actions) a = action_rng.uniform_int(2);
        const auto v_pi = policy_value(mdp, pi);
        for (int h = 0; h < 4; ++h)
            for (int s = 0; s < 4; ++s) {
                CHECK(v_pi.at(h, s) >= 0.0);
                CHECK(v_pi.at(h, s) <= v.at(h, s) + 1e-12);
                CHECK(v.at(h, s) <= 4 - h);
            }
    }
}

TEST_CASE("backward induction is bit-deterministic") {
    const auto mdp = random_mdp(5, 6, 3, 0.4, 77);
    const auto [q1, v1] = backward_induction(mdp);
    const auto [q2, v2] = backward_induction(mdp);
    CHECK(q1.values == q2.values);
    CHECK(v1.values == v2.values);
}

TEST_CASE("JSON round trip is lossless") {
    const auto mdp = random_mdp(3, 4, 2, 0.5, 13);
    const auto j1 = mdp.to_json();
    const auto back = EpisodicMdp::from_json(j1);
    CHECK(j1 == back.to_json());
    for (int h = 0; h < 3; ++h)
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) {
                CHECK(mdp.mean_reward(h, s, a) == back.mean_reward(h, s, a));
                if (h + 1 < 3) {
                    const auto r1 = mdp.transition_row(h, s, a);
                    const auto r2 = back.transition_row(h, s, a);
                    for (int sn = 0; sn < 4; ++sn) CHECK(r1[sn] == r2[sn]);
                }
            }
}

TEST_CASE("construction rejects malformed inputs") {
    const std::vector<double> good_t = {1, 0, 0, 1, 1, 0, 0, 1};
    const std::vector<double> good_r = {0.1, 0.6, 0.3, 0.9, 0.8, 0.2, 0.5, 0.7};

    CHECK_THROWS_AS(EpisodicMdp(2, 2, 2, 2, good_t, good_r), std::invalid_argument);
    {
        auto t = good_t;
        t[0] = 0.9;  // row sum 0.9
        CHECK_THROWS_AS(EpisodicMdp(2, 2, 2, 0, t, good_r), std::invalid_argument);
    }
    {
        auto t = good_t;
        t[0] = -0.1;
        t[1] = 1.1;
        CHECK_THROWS_AS(EpisodicMdp(2, 2, 2, 0, t, good_r), std::invalid_argument);
    }
    {
        auto r = good_r;
        r[3] = 1.2;
        CHECK_THROWS_AS(EpisodicMdp(2, 2, 2, 0, good_t, r), std::invalid_argument);
    }
    {
        std::vector<double> noise(8, 0.0);
        noise[3] = 0.2;  // mean 0.9 + 0.2 leaves [0,1]
        CHECK_THROWS_AS(EpisodicMdp(2, 2, 2, 0, good_t, good_r, noise), std::invalid_argument);
    }
}

TEST_CASE("near-one row sums are renormalized to exactly one") {
    std::vector<double> transitions = {0.3 + 1e-13, 0.7, 0.5, 0.5, 0.25, 0.75, 1.0, 0.0};
    std::vector<double> rewards(8, 0.5);
    EpisodicMdp mdp(2, 2, 2, 0, transitions, rewards);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) {
            const auto row = mdp.transition_row(0, s, a);
            double sum = 0.0;
            for (double p : row) sum += p;
            CHECK(sum == 1.0);
        }
}
