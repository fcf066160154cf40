// Small file helpers: round-trip-safe number formatting, atomic writes,
// and a minimal SVG line chart for plot-ready output.
#pragma once

#include <string>
#include <vector>

namespace tfmm {

// Shortest decimal form that parses back to the identical double.
std::string fmt_double(double v);

// Writes via a temp file + rename so partial output never lands.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

struct SvgSeries {
    std::string label;
    std::string color = "#2a7de1";
    std::vector<double> y;
};

// Self-contained polyline chart; x is the index (block).
std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           int width = 900, int height = 300);

} // namespace tfmm
