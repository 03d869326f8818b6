#pragma once

#include <vector>

#include "json.hpp"

#include "aqucb/mdp.hpp"

namespace aqucb {

/// Per-stage partition of state-action pairs into cells. Every (h, s, a) maps
/// to a cell index below num_cells; cells may be empty at some stages.
struct Aggregation {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    int num_cells = 0;
    std::vector<int> maps;  // h*S*A + s*A + a -> cell

    Aggregation() = default;
    Aggregation(int H, int S, int A, int M)
        : horizon(H),
          num_states(S),
          num_actions(A),
          num_cells(M),
          maps(static_cast<std::size_t>(H) * S * A, 0) {}

    std::size_t index(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
    }
    int cell(int h, int s, int a) const { return maps[index(h, s, a)]; }
    int& cell(int h, int s, int a) { return maps[index(h, s, a)]; }

    nlohmann::json to_json() const;
    static Aggregation from_json(const nlohmann::json& j, int horizon, int num_states,
                                 int num_actions);
};

/// Each state-action pair gets its own cell at every stage: M = S*A,
/// cell(h, s, a) = s*A + a.
Aggregation trivial_aggregation(int horizon, int num_states, int num_actions);

/// Cell occupancy per stage; counts sum to S*A at each stage.
struct AggregationReport {
    std::vector<std::vector<int>> occupancy;  // [stage][cell]
};

/// Checks that the aggregation matches the MDP's dimensions and that every
/// cell index is in range. Throws std::invalid_argument naming the offending
/// (h, s, a) otherwise. Unused cells are permitted.
AggregationReport validate(const Aggregation& agg, const EpisodicMdp& mdp);

/// Largest |Q*(s,a) - Q*(s',a')| over pairs sharing a cell at a common stage
/// (the per-cell max-min span; empty and singleton cells contribute 0).
double epsilon_of(const QTables& q_star, const Aggregation& agg);

/// Convenience overload that solves the MDP first.
double epsilon_of(const EpisodicMdp& mdp, const Aggregation& agg);

}  // namespace aqucb
