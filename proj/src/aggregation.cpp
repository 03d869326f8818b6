#include "aqucb/aggregation.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace aqucb {

nlohmann::json Aggregation::to_json() const {
    nlohmann::json j;
    j["num_cells"] = num_cells;
    auto maps_json = nlohmann::json::array();
    for (int h = 0; h < horizon; ++h) {
        auto stage = nlohmann::json::array();
        for (int s = 0; s < num_states; ++s) {
            auto per_state = nlohmann::json::array();
            for (int a = 0; a < num_actions; ++a) per_state.push_back(cell(h, s, a));
            stage.push_back(std::move(per_state));
        }
        maps_json.push_back(std::move(stage));
    }
    j["maps"] = std::move(maps_json);
    return j;
}

Aggregation Aggregation::from_json(const nlohmann::json& j, int horizon, int num_states,
                                   int num_actions) {
    Aggregation agg(horizon, num_states, num_actions, j.at("num_cells").get<int>());
    const auto& maps = j.at("maps");
    if (static_cast<int>(maps.size()) != horizon)
        throw std::invalid_argument("Aggregation::from_json: stage count mismatch");
    for (int h = 0; h < horizon; ++h) {
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a)
                agg.cell(h, s, a) = maps.at(h).at(s).at(a).get<int>();
    }
    return agg;
}

Aggregation trivial_aggregation(int horizon, int num_states, int num_actions) {
    Aggregation agg(horizon, num_states, num_actions, num_states * num_actions);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a) agg.cell(h, s, a) = s * num_actions + a;
    return agg;
}

AggregationReport validate(const Aggregation& agg, const EpisodicMdp& mdp) {
    if (agg.horizon != mdp.horizon() || agg.num_states != mdp.num_states() ||
        agg.num_actions != mdp.num_actions())
        throw std::invalid_argument("validate: aggregation dimensions do not match the MDP");
    if (agg.num_cells < 1) throw std::invalid_argument("validate: num_cells must be positive");
    if (agg.maps.size() !=
        static_cast<std::size_t>(agg.horizon) * agg.num_states * agg.num_actions)
        throw std::invalid_argument("validate: aggregation map is not a total function");

    AggregationReport report;
    report.occupancy.assign(agg.horizon, std::vector<int>(agg.num_cells, 0));
    for (int h = 0; h < agg.horizon; ++h) {
        for (int s = 0; s < agg.num_states; ++s) {
            for (int a = 0; a < agg.num_actions; ++a) {
                const int m = agg.cell(h, s, a);
                if (m < 0 || m >= agg.num_cells)
                    throw std::invalid_argument(
                        "validate: cell index " + std::to_string(m) + " out of range at (h=" +
                        std::to_string(h) + ", s=" + std::to_string(s) + ", a=" +
                        std::to_string(a) + ")");
                ++report.occupancy[h][m];
            }
        }
    }
    return report;
}

double epsilon_of(const QTables& q_star, const Aggregation& agg) {
    if (agg.horizon != q_star.horizon || agg.num_states != q_star.num_states ||
        agg.num_actions != q_star.num_actions)
        throw std::invalid_argument("epsilon_of: aggregation dimensions do not match Q*");

    double epsilon = 0.0;
    std::vector<double> lo(agg.num_cells), hi(agg.num_cells);
    for (int h = 0; h < agg.horizon; ++h) {
        std::fill(lo.begin(), lo.end(), std::numeric_limits<double>::infinity());
        std::fill(hi.begin(), hi.end(), -std::numeric_limits<double>::infinity());
        for (int s = 0; s < agg.num_states; ++s) {
            for (int a = 0; a < agg.num_actions; ++a) {
                const int m = agg.cell(h, s, a);
                const double q = q_star.at(h, s, a);
                lo[m] = std::min(lo[m], q);
                hi[m] = std::max(hi[m], q);
            }
        }
        for (int m = 0; m < agg.num_cells; ++m)
            if (hi[m] >= lo[m]) epsilon = std::max(epsilon, hi[m] - lo[m]);
    }
    return epsilon;
}

double epsilon_of(const EpisodicMdp& mdp, const Aggregation& agg) {
    validate(agg, mdp);
    return epsilon_of(backward_induction(mdp).first, agg);
}

}  // namespace aqucb
