#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geospread/csv.hpp"
#include "geospread/errors.hpp"

namespace geospread {
namespace detail {

inline std::string format_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace detail

/// Self-contained SVG line chart (fixed 800x500 viewport, no external
/// assets). One polyline per y column, legend shown when there are several.
inline void emit_svg(const std::filesystem::path& csv_path, const std::string& x_column,
                     const std::vector<std::string>& y_columns,
                     const std::filesystem::path& out_path) {
    if (y_columns.empty()) throw ConfigError("emit_svg: no y columns given");
    const CsvTable table = read_csv(csv_path);
    if (table.rows.empty()) throw ConfigError("emit_svg: no data rows in " + csv_path.string());
    const std::size_t xi = table.column_index(x_column);
    std::vector<std::size_t> yi;
    for (const auto& name : y_columns) yi.push_back(table.column_index(name));

    const double width = 800.0, height = 500.0;
    const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& row : table.rows) {
        if (!std::isfinite(row[xi])) continue;
        for (std::size_t c : yi) {
            if (!std::isfinite(row[c])) continue;
            if (first) {
                xmin = xmax = row[xi];
                ymin = ymax = row[c];
                first = false;
            } else {
                xmin = std::min(xmin, row[xi]);
                xmax = std::max(xmax, row[xi]);
                ymin = std::min(ymin, row[c]);
                ymax = std::max(ymax, row[c]);
            }
        }
    }
    if (first) throw ConfigError("emit_svg: no finite data points");
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymax += 0.5;
        ymin -= 0.5;
    }

    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open for writing: " + out_path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
           "width=\"800\" height=\"500\">\n";
    out << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";

    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";

    const int n_ticks = 5;
    for (int k = 0; k <= n_ticks; ++k) {
        const double fx = xmin + (xmax - xmin) * k / n_ticks;
        const double fy = ymin + (ymax - ymin) * k / n_ticks;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(fx)
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 18
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << detail::format_tick(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml << "\" y2=\""
            << sy(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << detail::format_tick(fy) << "</text>\n";
    }

    // axis labels
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">" << x_column
        << "</text>\n";
    std::string ylabel;
    for (std::size_t i = 0; i < y_columns.size(); ++i) {
        if (i) ylabel += ", ";
        ylabel += y_columns[i];
    }
    out << "<text x=\"15\" y=\"" << mt + ph / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 15 "
        << mt + ph / 2 << ")\">" << ylabel << "</text>\n";

    // one polyline per series; non-finite samples split the line
    for (std::size_t s = 0; s < yi.size(); ++s) {
        const char* color = palette[s % 8];
        std::string points;
        auto flush = [&]() {
            if (!points.empty()) {
                out << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
                points.clear();
            }
        };
        for (const auto& row : table.rows) {
            const double x = row[xi], y = row[yi[s]];
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(x), sy(y));
            points += buf;
        }
        flush();
    }

    if (yi.size() > 1) {
        const double lx = ml + pw - 150.0, ly = mt + 10.0;
        out << "<rect x=\"" << lx - 8 << "\" y=\"" << ly - 14 << "\" width=\"150\" height=\""
            << 18 * yi.size() + 8 << "\" fill=\"white\" stroke=\"#cccccc\"/>\n";
        for (std::size_t s = 0; s < yi.size(); ++s) {
            const double yy = ly + 18.0 * static_cast<double>(s);
            out << "<line x1=\"" << lx << "\" y1=\"" << yy - 4 << "\" x2=\"" << lx + 24
                << "\" y2=\"" << yy - 4 << "\" stroke=\"" << palette[s % 8]
                << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << lx + 30 << "\" y=\"" << yy
                << "\" font-size=\"12\" font-family=\"sans-serif\">" << y_columns[s]
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + out_path.string());
}

} // namespace geospread
