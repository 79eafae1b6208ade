// Deterministic SVG line/point plots rendered straight from condition
// summaries: no plotting dependency, byte-identical output for identical
// input. One panel per file, optional error bars from the 95% CIs.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcomm/analysis.hpp"
#include "netcomm/csv.hpp"

namespace netcomm {

struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
    double err = 0.0;
    bool has_err = false;
};

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<PlotPoint> points;
};

namespace detail {

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct AxisRange {
    double lo = 0.0, hi = 1.0;
    double scale(double v, double px_lo, double px_hi) const {
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

inline AxisRange axis_range(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(0.5, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

} // namespace detail

inline void render_svg_plot(std::ostream& out, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<PlotSeries>& series) {
    constexpr double kWidth = 640, kHeight = 420;
    constexpr double kLeft = 70, kRight = 620, kTop = 40, kBottom = 360;

    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            const double ylo = p.y - (p.has_err ? p.err : 0.0);
            const double yhi = p.y + (p.has_err ? p.err : 0.0);
            if (first) {
                x_lo = x_hi = p.x;
                y_lo = ylo;
                y_hi = yhi;
                first = false;
            } else {
                x_lo = std::min(x_lo, p.x);
                x_hi = std::max(x_hi, p.x);
                y_lo = std::min(y_lo, ylo);
                y_hi = std::max(y_hi, yhi);
            }
        }
    }
    if (first) throw std::runtime_error("render_svg_plot: no data to plot");
    const auto xr = detail::axis_range(x_lo, x_hi);
    const auto yr = detail::axis_range(y_lo, y_hi);
    auto px = [&](double x) { return detail::fmt_coord(xr.scale(x, kLeft, kRight)); };
    auto py = [&](double y) { return detail::fmt_coord(yr.scale(y, kBottom, kTop)); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // axes
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
        << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << kBottom << "\" x2=\"" << px(fx)
            << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << kBottom + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::fmt_tick(fx) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kLeft
            << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(fy)
            << "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt_tick(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << (kTop + kBottom) / 2 << ")\">" << y_label
        << "</text>\n";

    double legend_y = kTop + 6;
    for (const auto& s : series) {
        std::string path;
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            path += (i == 0 ? "M" : " L");
            path += px(s.points[i].x);
            path += " ";
            path += py(s.points[i].y);
        }
        if (s.points.size() > 1) {
            out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\"/>\n";
        }
        for (const auto& p : s.points) {
            if (p.has_err && p.err > 0.0) {
                out << "<line x1=\"" << px(p.x) << "\" y1=\"" << py(p.y - p.err) << "\" x2=\""
                    << px(p.x) << "\" y2=\"" << py(p.y + p.err) << "\" stroke=\"" << s.color
                    << "\" stroke-width=\"1\"/>\n";
            }
            out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"3\" fill=\""
                << s.color << "\"/>\n";
        }
        out << "<rect x=\"" << kRight - 150 << "\" y=\"" << legend_y << "\" width=\"12\" "
            << "height=\"12\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << kRight - 133 << "\" y=\"" << legend_y + 10
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
}

namespace detail {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                    "#d62728", "#9467bd", "#8c564b"};
    return colors;
}

inline void write_plot_file(const std::string& path, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<PlotSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot file: " + path);
    render_svg_plot(out, title, x_label, y_label, series);
}

} // namespace detail

// Renders the per-experiment panels from condition summaries:
//   experiment 1: each metric vs supervision rate, one line per topology
//   experiment 2: consistencies vs realized average degree
//   experiment 3: divergence metrics vs global-connection probability
// Returns the list of files written (relative to out_dir).
inline std::vector<std::string> emit_plots(const std::vector<ConditionSummary>& summaries,
                                           const std::string& out_dir) {
    if (summaries.empty()) throw std::runtime_error("no data to plot");
    std::vector<std::string> written;

    auto stat_point = [](const ConditionSummary& cs, const std::string& metric, double x) {
        const auto& st = cs.stats.at(metric);
        return PlotPoint{x, st.mean, st.ci_half, st.ci_available};
    };

    std::vector<const ConditionSummary*> exp1, exp2, exp3;
    for (const auto& cs : summaries) {
        if (cs.experiment_id == "1") exp1.push_back(&cs);
        if (cs.experiment_id == "2") exp2.push_back(&cs);
        if (cs.experiment_id == "3") exp3.push_back(&cs);
    }

    if (!exp1.empty()) {
        for (const auto& metric : summary_metric_names()) {
            if (metric == "realized_avg_degree") continue;
            std::map<std::string, PlotSeries> by_topology;
            for (const auto* cs : exp1) {
                auto& s = by_topology[cs->topology_kind];
                s.label = cs->topology_kind;
                s.points.push_back(stat_point(*cs, metric, cs->supervision_rate));
            }
            std::vector<PlotSeries> series;
            std::size_t color = 0;
            for (auto& [kind, s] : by_topology) {
                std::sort(s.points.begin(), s.points.end(),
                          [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
                s.color = detail::palette()[color++ % detail::palette().size()];
                series.push_back(std::move(s));
            }
            const std::string file = "exp1_" + metric + "_vs_supervision.svg";
            detail::write_plot_file(out_dir + "/" + file, metric + " by topology",
                                    "supervision rate", metric, series);
            written.push_back(file);
        }
    }

    if (!exp2.empty()) {
        std::vector<PlotSeries> series(2);
        series[0].label = "speaking_consistency";
        series[1].label = "listening_consistency";
        series[0].color = detail::palette()[0];
        series[1].color = detail::palette()[1];
        std::vector<const ConditionSummary*> ordered(exp2);
        std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
            return a->stats.at("realized_avg_degree").mean <
                   b->stats.at("realized_avg_degree").mean;
        });
        for (const auto* cs : ordered) {
            const double x = cs->stats.at("realized_avg_degree").mean;
            series[0].points.push_back(stat_point(*cs, "speaking_consistency", x));
            series[1].points.push_back(stat_point(*cs, "listening_consistency", x));
        }
        const std::string file = "exp2_consistency_vs_degree.svg";
        detail::write_plot_file(out_dir + "/" + file, "consistency vs average degree",
                                "realized average degree", "consistency", series);
        written.push_back(file);
    }

    if (!exp3.empty()) {
        const std::vector<std::string> metrics = {
            "between_agent_divergence", "within_agent_divergence", "signaling_divergence"};
        std::vector<PlotSeries> series;
        std::size_t color = 0;
        for (const auto& metric : metrics) {
            PlotSeries s;
            s.label = metric;
            s.color = detail::palette()[color++];
            std::vector<const ConditionSummary*> ordered(exp3);
            std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
                return a->topology_param < b->topology_param;
            });
            // average across supervision rates at each probability
            std::map<double, std::pair<double, int>> by_p;
            for (const auto* cs : ordered) {
                auto& acc = by_p[cs->topology_param];
                acc.first += cs->stats.at(metric).mean;
                acc.second += 1;
            }
            for (const auto& [p, acc] : by_p) {
                s.points.push_back({p, acc.first / acc.second, 0.0, false});
            }
            series.push_back(std::move(s));
        }
        const std::string file = "exp3_divergences_vs_global_probability.svg";
        detail::write_plot_file(out_dir + "/" + file,
                                "divergences vs global connection probability",
                                "global connection probability", "divergence", series);
        written.push_back(file);
    }

    if (written.empty()) throw std::runtime_error("no data to plot");
    return written;
}

} // namespace netcomm
