#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "aqucb/mdp.hpp"
#include "aqucb/rng.hpp"

namespace aqucb::test {

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of V^pi at the initial state from independent rollouts.
inline MonteCarloEstimate mc_policy_value(const EpisodicMdp& mdp, const DeterministicPolicy& pi,
                                          long long rollouts, std::uint64_t seed) {
    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (long long r = 0; r < rollouts; ++r) {
        int s = mdp.initial_state();
        double ret = 0.0;
        for (int h = 0; h < mdp.horizon(); ++h) {
            const int a = pi.at(h, s);
            if (h + 1 < mdp.horizon()) {
                auto [next, reward] = sample_transition(mdp, h, s, a, rng);
                ret += reward;
                s = next;
            } else {
                ret += sample_reward(mdp, h, s, a, rng);
            }
        }
        sum += ret;
        sum_sq += ret * ret;
    }
    const double n = static_cast<double>(rollouts);
    const double mean = sum / n;
    const double variance = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(variance / n)};
}

/// Direct evaluation of the stepsize weights from their defining products,
/// one product per entry (quadratic, unlike the library's suffix scan).
inline std::vector<double> alpha_weights_reference(long long t, int horizon) {
    auto alpha_ref = [horizon](long long j) {
        return static_cast<double>(horizon + 1) / static_cast<double>(horizon + j);
    };
    std::vector<double> w(static_cast<std::size_t>(t) + 1, 0.0);
    {
        double prod = 1.0;
        for (long long j = 1; j <= t; ++j) prod *= 1.0 - alpha_ref(j);
        w[0] = prod;
    }
    for (long long i = 1; i <= t; ++i) {
        double prod = alpha_ref(i);
        for (long long j = i + 1; j <= t; ++j) prod *= 1.0 - alpha_ref(j);
        w[static_cast<std::size_t>(i)] = prod;
    }
    return w;
}

/// Scalar replay of the capped optimistic update for a single-cell stage:
/// the estimate after n visits with constant reward r, next-stage value 0 and
/// bonus beta(j) at the j-th visit.
inline double scalar_update_recurrence(int horizon, long long n, double reward,
                                       const std::function<double(long long)>& beta) {
    double q = static_cast<double>(horizon);
    for (long long j = 1; j <= n; ++j) {
        const double step =
            static_cast<double>(horizon + 1) / static_cast<double>(horizon + j);
        const double target = reward + beta(j) / std::sqrt(static_cast<double>(j));
        q = std::min((1.0 - step) * q + step * target, static_cast<double>(horizon));
    }
    return q;
}

}  // namespace aqucb::test
