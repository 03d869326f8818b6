#include "aqucb/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "aqucb/harness.hpp"
#include "aqucb/text.hpp"

namespace aqucb {

namespace {

constexpr int kWidth = 880;
constexpr int kHeight = 560;
constexpr int kMarginLeft = 90, kMarginRight = 30, kMarginTop = 40, kMarginBottom = 60;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

/// Largest "nice" step (1/2/5 times a power of ten) giving at most max_ticks
/// intervals on [0, span].
double nice_step(double span, int max_ticks) {
    if (span <= 0.0) return 1.0;
    const double raw = span / max_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0, 10.0})
        if (mag * mult >= raw) return mag * mult;
    return mag * 10.0;
}

std::string tick_label(double v) {
    if (v == 0.0) return "0";
    if (std::abs(v) >= 10000.0) {
        std::ostringstream ss;
        ss << v / 1000.0 << "k";
        return ss.str();
    }
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

struct Scale {
    double x0, x1, y0, y1;
    double px(double x) const {
        return kMarginLeft + (x - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kHeight - kMarginBottom -
               (y - y0) / (y1 - y0) * (kHeight - kMarginTop - kMarginBottom);
    }
};

std::string coord(double v) {
    std::ostringstream ss;
    ss.precision(2);
    ss << std::fixed << v;
    return ss.str();
}

/// Thins a curve of n points to at most ~800 for the polyline.
std::vector<std::size_t> plot_indices(std::size_t n) {
    std::vector<std::size_t> idx;
    const std::size_t step = std::max<std::size_t>(1, n / 800);
    for (std::size_t i = 0; i < n; i += step) idx.push_back(i);
    if (idx.empty() || idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

}  // namespace

RegretGroup read_regret_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV '" + path + "'");
    RegretGroup group;
    group.label = std::filesystem::path(path).stem().string();

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV '" + path + "' is empty");
    const auto header = split(trim(line), ',');
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (std::string(trim(header[i])) == name) return i;
        throw std::runtime_error("CSV '" + path + "' lacks column '" + name + "'");
    };
    const std::size_t seed_col = column("seed");
    const std::size_t k_col = column("k");
    const std::size_t cum_col = column("cumulative_regret");

    std::map<std::uint64_t, std::size_t> by_seed;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() <= std::max({seed_col, k_col, cum_col}))
            throw std::runtime_error("CSV '" + path + "' line " + std::to_string(line_no) +
                                     ": too few fields");
        const std::uint64_t seed = std::stoull(fields[seed_col]);
        const long long k = std::stoll(fields[k_col]);
        const double cum = std::stod(fields[cum_col]);
        auto it = by_seed.find(seed);
        if (it == by_seed.end()) {
            it = by_seed.emplace(seed, group.series.size()).first;
            group.series.push_back({seed, {}});
        }
        auto& curve = group.series[it->second].cumulative;
        if (static_cast<std::size_t>(k) != curve.size() + 1)
            throw std::runtime_error("CSV '" + path + "' line " + std::to_string(line_no) +
                                     ": episodes for seed " + std::to_string(seed) +
                                     " are not consecutive from 1");
        curve.push_back(cum);
    }
    if (group.series.empty()) throw std::runtime_error("CSV '" + path + "' has no data rows");
    return group;
}

std::string render_regret_svg(const std::vector<RegretGroup>& groups,
                              const BoundOverlay& overlay) {
    if (groups.empty()) throw std::runtime_error("render_regret_svg: no input groups");
    const std::size_t K = groups.front().series.front().cumulative.size();
    for (const auto& g : groups)
        for (const auto& s : g.series)
            if (s.cumulative.size() != K)
                throw std::runtime_error("render_regret_svg: episode count mismatch between '" +
                                         groups.front().label + "' and '" + g.label + "'");

    // mean and min/max band per group
    struct Band {
        std::vector<double> mean, lo, hi;
    };
    std::vector<Band> bands(groups.size());
    double y_max = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        auto& b = bands[gi];
        b.mean.assign(K, 0.0);
        b.lo.assign(K, 0.0);
        b.hi.assign(K, 0.0);
        const auto& series = groups[gi].series;
        for (std::size_t i = 0; i < K; ++i) {
            double sum = 0.0, lo = series[0].cumulative[i], hi = lo;
            for (const auto& s : series) {
                const double v = s.cumulative[i];
                sum += v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            b.mean[i] = sum / static_cast<double>(series.size());
            b.lo[i] = lo;
            b.hi[i] = hi;
            y_max = std::max(y_max, hi);
        }
    }

    std::vector<double> bound_curve;
    if (overlay.enabled) {
        bound_curve.resize(K);
        for (std::size_t i = 0; i < K; ++i)
            bound_curve[i] = theorem_bound(static_cast<long long>(i) + 1, overlay.horizon,
                                           overlay.num_cells, overlay.delta, overlay.epsilon);
        y_max = std::max(y_max, bound_curve.back());
    }
    if (y_max <= 0.0) y_max = 1.0;

    const Scale sc{1.0, static_cast<double>(K), 0.0, y_max * 1.05};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

    // axes and ticks
    const double x_step = nice_step(static_cast<double>(K) - 1.0, 8);
    const double y_step = nice_step(sc.y1, 8);
    svg << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (double x = 0.0; x <= static_cast<double>(K); x += x_step) {
        const double gx = sc.px(std::max(1.0, x));
        svg << "<line x1=\"" << coord(gx) << "\" y1=\"" << kMarginTop << "\" x2=\"" << coord(gx)
            << "\" y2=\"" << kHeight - kMarginBottom << "\"/>\n";
    }
    for (double y = 0.0; y <= sc.y1; y += y_step) {
        const double gy = sc.py(y);
        svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << coord(gy) << "\" x2=\""
            << kWidth - kMarginRight << "\" y2=\"" << coord(gy) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
    for (double x = 0.0; x <= static_cast<double>(K); x += x_step)
        svg << "<text x=\"" << coord(sc.px(std::max(1.0, x))) << "\" y=\""
            << kHeight - kMarginBottom + 18 << "\" text-anchor=\"middle\">" << tick_label(x)
            << "</text>\n";
    for (double y = 0.0; y <= sc.y1; y += y_step)
        svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << coord(sc.py(y) + 4)
            << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
    svg << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\">episode k</text>\n";
    svg << "<text x=\"20\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">cumulative regret</text>\n";
    svg << "</g>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";

    const auto idx = plot_indices(K);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const char* color = kColors[gi % (sizeof(kColors) / sizeof(kColors[0]))];
        const auto& b = bands[gi];
        if (groups[gi].series.size() > 1) {
            svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
                << "points=\"";
            for (const auto i : idx)
                svg << coord(sc.px(static_cast<double>(i) + 1)) << "," << coord(sc.py(b.hi[i]))
                    << " ";
            for (auto it = idx.rbegin(); it != idx.rend(); ++it)
                svg << coord(sc.px(static_cast<double>(*it) + 1)) << ","
                    << coord(sc.py(b.lo[*it])) << " ";
            svg << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto i : idx)
            svg << coord(sc.px(static_cast<double>(i) + 1)) << "," << coord(sc.py(b.mean[i]))
                << " ";
        svg << "\"/>\n";
        svg << "<text font-family=\"sans-serif\" font-size=\"13\" fill=\"" << color << "\" x=\""
            << kWidth - kMarginRight - 10 << "\" y=\"" << kMarginTop + 18 * (gi + 1)
            << "\" text-anchor=\"end\">" << groups[gi].label << "</text>\n";
    }

    if (overlay.enabled) {
        svg << "<polyline fill=\"none\" stroke=\"#555555\" stroke-width=\"2\" "
            << "stroke-dasharray=\"8 5\" points=\"";
        for (const auto i : idx)
            svg << coord(sc.px(static_cast<double>(i) + 1)) << ","
                << coord(sc.py(bound_curve[i])) << " ";
        svg << "\"/>\n";
        svg << "<text font-family=\"sans-serif\" font-size=\"13\" fill=\"#555555\" x=\""
            << kWidth - kMarginRight - 10 << "\" y=\"" << kMarginTop + 18 * (groups.size() + 1)
            << "\" text-anchor=\"end\">regret envelope</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace aqucb
