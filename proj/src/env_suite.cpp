#include "aqucb/env_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aqucb/rng.hpp"

namespace aqucb {

GeneratedInstance expand_aggregate_mdp(const DuplicationSpec& spec) {
    const EpisodicMdp& base = spec.base;
    const int c = spec.copies;
    const double eta = spec.perturbation;
    if (c < 1) throw std::invalid_argument("expand_aggregate_mdp: copies must be >= 1");
    if (eta < 0.0) throw std::invalid_argument("expand_aggregate_mdp: negative perturbation");

    const int H = base.horizon(), L = base.num_states(), A = base.num_actions();
    const int S = L * c;

    for (int h = 0; h < H; ++h)
        for (int s = 0; s < L; ++s)
            for (int a = 0; a < A; ++a) {
                const double r = base.mean_reward(h, s, a);
                if (r - eta < 0.0 || r + eta > 1.0)
                    throw std::invalid_argument(
                        "expand_aggregate_mdp: perturbed rewards could leave [0,1]; rescale the "
                        "base rewards first");
            }

    // Perturbations are drawn as unit deviates scaled by eta, so the same seed
    // yields proportional perturbations across different eta values.
    Rng rng(spec.seed);
    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < L; ++s)
            for (int i = 0; i < c; ++i)
                for (int a = 0; a < A; ++a) {
                    const double unit = rng.uniform(-1.0, 1.0);
                    rewards[(static_cast<std::size_t>(h) * S + s * c + i) * A + a] =
                        base.mean_reward(h, s, a) + eta * unit;
                }

    std::vector<double> transitions(static_cast<std::size_t>(H - 1) * S * A * S, 0.0);
    for (int h = 0; h + 1 < H; ++h)
        for (int s = 0; s < L; ++s)
            for (int a = 0; a < A; ++a) {
                const auto row = base.transition_row(h, s, a);
                for (int i = 0; i < c; ++i) {
                    double* out =
                        transitions.data() +
                        ((static_cast<std::size_t>(h) * S + s * c + i) * A + a) * S;
                    for (int sn = 0; sn < L; ++sn)
                        for (int j = 0; j < c; ++j) out[sn * c + j] = row[sn] / c;
                }
            }

    EpisodicMdp mdp(H, S, A, base.initial_state() * c, std::move(transitions),
                    std::move(rewards));

    Aggregation agg(H, S, A, L * A);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < L; ++s)
            for (int i = 0; i < c; ++i)
                for (int a = 0; a < A; ++a) agg.cell(h, s * c + i, a) = s * A + a;

    const double measured = epsilon_of(mdp, agg);
    return {std::move(mdp), std::move(agg), measured};
}

EpisodicMdp chain_mdp(int horizon, int length, double slip) {
    if (length < 2) throw std::invalid_argument("chain_mdp: length must be >= 2");
    if (!(slip >= 0.0 && slip < 0.5))
        throw std::invalid_argument("chain_mdp: slip must lie in [0, 0.5)");

    const int H = horizon, S = length, A = 2;
    constexpr int kLeft = 0, kRight = 1;

    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
    for (int h = 0; h < H; ++h)
        rewards[(static_cast<std::size_t>(h) * S + (S - 1)) * A + kRight] = 1.0;

    std::vector<double> transitions(static_cast<std::size_t>(H - 1) * S * A * S, 0.0);
    for (int h = 0; h + 1 < H; ++h)
        for (int s = 0; s < S; ++s) {
            double* left_row =
                transitions.data() + ((static_cast<std::size_t>(h) * S + s) * A + kLeft) * S;
            left_row[std::max(s - 1, 0)] = 1.0;
            double* right_row =
                transitions.data() + ((static_cast<std::size_t>(h) * S + s) * A + kRight) * S;
            const int advanced = std::min(s + 1, S - 1);
            right_row[advanced] += 1.0 - slip;
            right_row[s] += slip;
        }

    return EpisodicMdp(H, S, A, 0, std::move(transitions), std::move(rewards));
}

EpisodicMdp random_mdp(int horizon, int num_states, int num_actions, double sparsity,
                       std::uint64_t seed) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0))
        throw std::invalid_argument("random_mdp: sparsity must lie in [0, 1]");
    const int H = horizon, S = num_states, A = num_actions;
    Rng rng(seed);

    const int support = std::max(1, static_cast<int>(std::llround((1.0 - sparsity) * S)));
    std::vector<int> candidates(S);
    std::vector<double> transitions(static_cast<std::size_t>(std::max(H - 1, 0)) * S * A * S, 0.0);
    for (int h = 0; h + 1 < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                std::iota(candidates.begin(), candidates.end(), 0);
                for (int i = 0; i < support; ++i)  // partial Fisher-Yates
                    std::swap(candidates[i], candidates[i + rng.uniform_int(S - i)]);
                double* row =
                    transitions.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * S;
                double sum = 0.0;
                for (int i = 0; i < support; ++i) {
                    // exponential deviates give a flat Dirichlet after normalization
                    const double e = -std::log(1.0 - rng.uniform01());
                    row[candidates[i]] = e;
                    sum += e;
                }
                for (int i = 0; i < support; ++i) row[candidates[i]] /= sum;
                // pin the row sum to exactly 1
                double total = 0.0;
                for (int sn = 0; sn < S; ++sn) total += row[sn];
                row[candidates[0]] += 1.0 - total;
            }

    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A);
    for (double& r : rewards) r = rng.uniform01();

    return EpisodicMdp(H, S, A, 0, std::move(transitions), std::move(rewards));
}

EpisodicMdp with_rewards_rescaled(const EpisodicMdp& mdp, double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
        throw std::invalid_argument("with_rewards_rescaled: need 0 <= lo <= hi <= 1");
    const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();

    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A);
    std::vector<double> noise;
    if (mdp.has_reward_noise()) noise.resize(rewards.size());
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const std::size_t i = mdp.sa_index(h, s, a);
                rewards[i] = lo + mdp.mean_reward(h, s, a) * (hi - lo);
                if (!noise.empty()) noise[i] = mdp.noise_half_width(h, s, a);
            }

    std::vector<double> transitions;
    if (H > 1) {
        transitions.reserve(static_cast<std::size_t>(H - 1) * S * A * S);
        for (int h = 0; h + 1 < H; ++h)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    auto row = mdp.transition_row(h, s, a);
                    transitions.insert(transitions.end(), row.begin(), row.end());
                }
    }
    return EpisodicMdp(H, S, A, mdp.initial_state(), std::move(transitions), std::move(rewards),
                       std::move(noise));
}

}  // namespace aqucb
