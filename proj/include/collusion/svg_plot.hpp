#pragma once

/// Self-contained SVG line charts of a CurveTable: λ on the x axis, one
/// series per remaining column. Output bytes depend only on the table.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "collusion/curve_table.hpp"
#include "collusion/errors.hpp"

namespace collusion {

struct SvgOptions {
    std::string title;
    std::vector<std::string> columns;  ///< series to draw; empty = every non-λ column
};

namespace detail {

inline constexpr double kSvgWidth = 800.0;
inline constexpr double kSvgHeight = 600.0;
inline constexpr double kPlotLeft = 80.0;
inline constexpr double kPlotRight = 640.0;
inline constexpr double kPlotTop = 50.0;
inline constexpr double kPlotBottom = 540.0;

inline constexpr std::array<std::string_view, 8> kPalette = {
    "#000000", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

inline std::string coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

inline std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

inline std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Renders the table; n/a cells split a series into separate polylines.
inline std::string render_svg(const CurveTable& t, const SvgOptions& opt = {}) {
    t.validate();
    std::vector<std::size_t> series;
    if (opt.columns.empty()) {
        for (std::size_t k = 1; k < t.column_names.size(); ++k) series.push_back(k);
    } else {
        for (const auto& name : opt.columns) {
            const auto k = t.column(name);
            if (!k || *k == 0) throw ParameterError("unknown plot column '" + name + "'");
            series.push_back(*k);
        }
    }

    const double x_min = *t.rows.front()[0];
    const double x_max = *t.rows.back()[0];
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (const auto& row : t.rows) {
        for (auto k : series) {
            if (row[k]) {
                y_min = std::min(y_min, *row[k]);
                y_max = std::max(y_max, *row[k]);
            }
        }
    }
    if (!std::isfinite(y_min)) {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    } else {
        const double pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }

    using namespace detail;
    auto px = [&](double x) { return kPlotLeft + (x - x_min) / (x_max - x_min) * (kPlotRight - kPlotLeft); };
    auto py = [&](double y) { return kPlotBottom - (y - y_min) / (y_max - y_min) * (kPlotBottom - kPlotTop); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    if (!opt.title.empty()) {
        s += "<text x=\"" + coord(0.5 * (kPlotLeft + kPlotRight)) +
             "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
             escape_xml(opt.title) + "</text>\n";
    }

    // Axes and ticks.
    s += "<g stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
    s += "<line x1=\"" + coord(kPlotLeft) + "\" y1=\"" + coord(kPlotBottom) + "\" x2=\"" +
         coord(kPlotRight) + "\" y2=\"" + coord(kPlotBottom) + "\"/>\n";
    s += "<line x1=\"" + coord(kPlotLeft) + "\" y1=\"" + coord(kPlotTop) + "\" x2=\"" +
         coord(kPlotLeft) + "\" y2=\"" + coord(kPlotBottom) + "\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = kPlotLeft + (kPlotRight - kPlotLeft) * i / kTicks;
        const double fy = kPlotBottom - (kPlotBottom - kPlotTop) * i / kTicks;
        s += "<line x1=\"" + coord(fx) + "\" y1=\"" + coord(kPlotBottom) + "\" x2=\"" + coord(fx) +
             "\" y2=\"" + coord(kPlotBottom + 5) + "\"/>\n";
        s += "<line x1=\"" + coord(kPlotLeft - 5) + "\" y1=\"" + coord(fy) + "\" x2=\"" +
             coord(kPlotLeft) + "\" y2=\"" + coord(fy) + "\"/>\n";
    }
    s += "</g>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = kPlotLeft + (kPlotRight - kPlotLeft) * i / kTicks;
        const double fy = kPlotBottom - (kPlotBottom - kPlotTop) * i / kTicks;
        s += "<text x=\"" + coord(fx) + "\" y=\"" + coord(kPlotBottom + 20) +
             "\" text-anchor=\"middle\">" + tick_label(x_min + (x_max - x_min) * i / kTicks) +
             "</text>\n";
        s += "<text x=\"" + coord(kPlotLeft - 8) + "\" y=\"" + coord(fy + 4) +
             "\" text-anchor=\"end\">" + tick_label(y_min + (y_max - y_min) * i / kTicks) +
             "</text>\n";
    }
    s += "<text x=\"" + coord(0.5 * (kPlotLeft + kPlotRight)) + "\" y=\"" + coord(kPlotBottom + 45) +
         "\" text-anchor=\"middle\">" + escape_xml(t.column_names[0]) + "</text>\n";
    s += "<text x=\"20\" y=\"" + coord(0.5 * (kPlotTop + kPlotBottom)) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         coord(0.5 * (kPlotTop + kPlotBottom)) + ")\">value</text>\n";
    s += "</g>\n";

    // Series, one polyline per contiguous run of applicable cells.
    for (std::size_t idx = 0; idx < series.size(); ++idx) {
        const auto k = series[idx];
        const auto colour = kPalette[idx % kPalette.size()];
        std::vector<std::string> runs;
        std::string points;
        std::size_t count = 0;
        auto flush = [&] {
            if (count >= 1) runs.push_back(points);
            points.clear();
            count = 0;
        };
        for (const auto& row : t.rows) {
            if (!row[k]) {
                flush();
                continue;
            }
            if (count) points += ' ';
            points += coord(px(*row[0])) + "," + coord(py(*row[k]));
            ++count;
        }
        flush();
        for (const auto& run : runs) {
            s += "<polyline class=\"series\" data-column=\"" + escape_xml(t.column_names[k]) +
                 "\" fill=\"none\" stroke=\"" + std::string(colour) +
                 "\" stroke-width=\"1.5\" points=\"" + run + "\"/>\n";
        }
        const double ly = kPlotTop + 20.0 * idx;
        s += "<line x1=\"660\" y1=\"" + coord(ly) + "\" x2=\"690\" y2=\"" + coord(ly) +
             "\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"696\" y=\"" + coord(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_xml(t.column_names[k]) +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace collusion
