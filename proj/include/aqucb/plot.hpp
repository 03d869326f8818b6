#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aqucb {

/// Cumulative regret across episodes for one seed; k runs 1..curve size.
struct RegretSeries {
    std::uint64_t seed = 0;
    std::vector<double> cumulative;
};

/// One CSV file's worth of curves.
struct RegretGroup {
    std::string label;  // file stem
    std::vector<RegretSeries> series;
};

/// Reads a seed,k,...,cumulative_regret,... CSV produced by the harness.
RegretGroup read_regret_csv(const std::string& path);

struct BoundOverlay {
    bool enabled = false;
    int horizon = 0;
    int num_cells = 0;
    double delta = 0.0;
    double epsilon = 0.0;
};

/// Renders mean cumulative-regret curves with min/max bands across seeds, one
/// group per input CSV, optionally overlaying the regret envelope as a dashed
/// curve. All groups must share the same episode count. Pure static SVG.
std::string render_regret_svg(const std::vector<RegretGroup>& groups,
                              const BoundOverlay& overlay);

}  // namespace aqucb
