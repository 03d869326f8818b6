#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aqucb/aggregation.hpp"
#include "aqucb/env_suite.hpp"
#include "aqucb/rng.hpp"

using namespace aqucb;

TEST_CASE("trivial aggregation indexing") {
    {
        const auto agg = trivial_aggregation(3, 1, 1);
        CHECK(agg.num_cells == 1);
        for (int h = 0; h < 3; ++h) CHECK(agg.cell(h, 0, 0) == 0);
    }
    {
        const auto agg = trivial_aggregation(2, 2, 3);
        CHECK(agg.num_cells == 6);
        CHECK(agg.cell(0, 1, 2) == 5);
        CHECK(agg.cell(1, 1, 2) == 5);
        CHECK(agg.cell(1, 0, 1) == 1);
    }
}

TEST_CASE("epsilon is zero for the trivial aggregation") {
    for (std::uint64_t seed : {3, 4, 5}) {
        const auto mdp = random_mdp(3, 4, 2, 0.2, seed);
        const auto agg = trivial_aggregation(3, 4, 2);
        CHECK(epsilon_of(mdp, agg) == 0.0);
    }
}

TEST_CASE("one cell per stage collapses epsilon to the largest stage span") {
    const auto mdp = random_mdp(3, 4, 2, 0.0, 8);
    Aggregation agg(3, 4, 2, 1);  // every pair in cell 0
    const auto [q, v] = backward_induction(mdp);
    double expected = 0.0;
    for (int h = 0; h < 3; ++h) {
        double lo = q.at(h, 0, 0), hi = lo;
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) {
                lo = std::min(lo, q.at(h, s, a));
                hi = std::max(hi, q.at(h, s, a));
            }
        expected = std::max(expected, hi - lo);
    }
    CHECK(epsilon_of(q, agg) == expected);
    CHECK(expected > 0.0);
}

TEST_CASE("unperturbed duplication has zero measured error") {
    const auto base = random_mdp(3, 4, 2, 0.0, 15);
    const auto instance = expand_aggregate_mdp({base, 3, 0.0, 1});
    CHECK(instance.measured_epsilon <= 1e-10);
}

TEST_CASE("validate reports occupancy that sums to S*A per stage") {
    const auto mdp = random_mdp(3, 4, 2, 0.0, 6);
    const auto agg = trivial_aggregation(3, 4, 2);
    const auto report = validate(agg, mdp);
    REQUIRE(report.occupancy.size() == 3);
    for (const auto& stage : report.occupancy) {
        CHECK(std::accumulate(stage.begin(), stage.end(), 0) == 4 * 2);
        for (int count : stage) CHECK(count == 1);
    }
}

TEST_CASE("validate names the offending triple for out-of-range cells") {
    const auto mdp = random_mdp(2, 2, 2, 0.0, 7);
    auto agg = trivial_aggregation(2, 2, 2);
    agg.cell(1, 1, 0) = agg.num_cells;  // one past the end
    try {
        validate(agg, mdp);
        FAIL("expected validate to throw");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("h=1") != std::string::npos);
        CHECK(what.find("s=1") != std::string::npos);
        CHECK(what.find("a=0") != std::string::npos);
    }
}

TEST_CASE("unused cells are permitted") {
    const auto mdp = random_mdp(2, 2, 2, 0.0, 9);
    Aggregation agg(2, 2, 2, 10);  // all pairs in cell 0; cells 1..9 unused
    const auto report = validate(agg, mdp);
    CHECK(report.occupancy[0][0] == 4);
    CHECK(report.occupancy[0][5] == 0);
    CHECK(epsilon_of(mdp, agg) >= 0.0);
}

TEST_CASE("dimension mismatch is rejected") {
    const auto mdp = random_mdp(3, 4, 2, 0.0, 10);
    const auto agg = trivial_aggregation(3, 4, 3);  // wrong action count
    CHECK_THROWS_AS(validate(agg, mdp), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_of(mdp, agg), std::invalid_argument);
}

TEST_CASE("epsilon is invariant under cell relabeling") {
    const auto mdp = random_mdp(3, 4, 2, 0.0, 20);
    const auto [q, v] = backward_induction(mdp);
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        Aggregation agg(3, 4, 2, 4);
        for (auto& m : agg.maps) m = rng.uniform_int(4);
        // random permutation of the cell labels
        std::vector<int> perm(4);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 3; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
        Aggregation relabeled = agg;
        for (auto& m : relabeled.maps) m = perm[m];
        CHECK(epsilon_of(q, agg) == epsilon_of(q, relabeled));
    }
}

TEST_CASE("merging cells never decreases epsilon") {
    const auto mdp = random_mdp(3, 4, 3, 0.0, 21);
    const auto [q, v] = backward_induction(mdp);
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Aggregation agg(3, 4, 3, 6);
        for (auto& m : agg.maps) m = rng.uniform_int(6);
        double eps = epsilon_of(q, agg);
        // chain of random merges: redirect one cell into another at one stage
        for (int merge = 0; merge < 4; ++merge) {
            const int h = rng.uniform_int(3);
            const int from = rng.uniform_int(6);
            const int to = rng.uniform_int(6);
            for (int s = 0; s < 4; ++s)
                for (int a = 0; a < 3; ++a)
                    if (agg.cell(h, s, a) == from) agg.cell(h, s, a) = to;
            const double merged_eps = epsilon_of(q, agg);
            CHECK(merged_eps >= eps - 1e-15);
            eps = merged_eps;
        }
    }
}

TEST_CASE("aggregation JSON round trip") {
    const auto agg = trivial_aggregation(3, 4, 2);
    const auto j = agg.to_json();
    const auto back = Aggregation::from_json(j, 3, 4, 2);
    CHECK(back.num_cells == agg.num_cells);
    CHECK(back.maps == agg.maps);
    CHECK(back.to_json() == j);
}
