#pragma once

#include <cstdint>

#include "aqucb/aggregation.hpp"
#include "aqucb/mdp.hpp"

namespace aqucb {

/// Recipe for a duplicated-state expansion: every latent state becomes
/// `copies` exchangeable copies, so the natural (latent state, action)
/// aggregation has zero error by construction; a reward perturbation of
/// half-width `perturbation` per copy breaks the symmetry and produces a
/// measurable positive error.
struct DuplicationSpec {
    EpisodicMdp base;
    int copies = 1;
    double perturbation = 0.0;
    std::uint64_t seed = 0;
};

struct GeneratedInstance {
    EpisodicMdp mdp;
    Aggregation aggregation;
    double measured_epsilon = 0.0;
};

/// Expands the base MDP: copy i of latent state s has index s*copies + i,
/// copies inherit the latent rewards (then independently perturbed by uniform
/// draws in [-perturbation, +perturbation]) and kernels that split each latent
/// transition uniformly among the successor's copies. The returned aggregation
/// maps (copy of s, a) to cell s*A + a at every stage; measured_epsilon is the
/// exact aggregation error of the result, which is 0 for perturbation 0 and
/// otherwise generally differs from the nominal perturbation (it compounds
/// through the backup). Throws if perturbed rewards could leave [0, 1].
GeneratedInstance expand_aggregate_mdp(const DuplicationSpec& spec);

/// Hard-exploration chain on states 0..length-1 starting at 0. Action 0
/// ("left") retreats one state deterministically; action 1 ("right") advances
/// with probability 1-slip and stays put otherwise. The only reward is 1 for
/// playing right at the last state, at every stage.
EpisodicMdp chain_mdp(int horizon, int length, double slip);

/// Seeded random instance: Dirichlet-style kernels (normalized positive
/// draws), uniform reward means in [0, 1], initial state 0. sparsity in [0, 1]
/// shrinks each row's support; sparsity 1 leaves a single successor per
/// (h, s, a), i.e. a deterministic kernel.
EpisodicMdp random_mdp(int horizon, int num_states, int num_actions, double sparsity,
                       std::uint64_t seed);

/// Affine map of all mean rewards from [0, 1] into [lo, hi]; used to leave
/// room for perturbations or noise.
EpisodicMdp with_rewards_rescaled(const EpisodicMdp& mdp, double lo, double hi);

}  // namespace aqucb
