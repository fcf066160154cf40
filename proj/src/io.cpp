#include "tfmm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tfmm {

std::string fmt_double(double v) {
    char buf[40];
    // Try increasing precision until the value round-trips.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           int width, int height) {
    const int margin = 45;
    double lo = 0.0, hi = 1.0;
    std::size_t n = 0;
    bool first = true;
    for (const auto& s : series) {
        n = std::max(n, s.y.size());
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi <= lo) hi = lo + 1.0;

    auto px = [&](std::size_t i) {
        return margin + (width - 2 * margin) * (n > 1 ? double(i) / double(n - 1) : 0.5);
    };
    auto py = [&](double v) { return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << margin << "' y='18' font-family='sans-serif' font-size='13'>" << title
        << "</text>\n"
        << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
        << "' y2='" << height - margin << "' stroke='#888'/>\n"
        << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='#888'/>\n"
        << "<text x='6' y='" << py(hi) + 4 << "' font-family='sans-serif' font-size='10'>"
        << fmt_double(hi) << "</text>\n"
        << "<text x='6' y='" << py(lo) + 4 << "' font-family='sans-serif' font-size='10'>"
        << fmt_double(lo) << "</text>\n";
    int label_y = 18;
    for (const auto& s : series) {
        svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
        for (std::size_t i = 0; i < s.y.size(); ++i)
            svg << px(i) << "," << py(s.y[i]) << (i + 1 < s.y.size() ? " " : "");
        svg << "'/>\n";
        svg << "<text x='" << width - margin - 160 << "' y='" << label_y << "' fill='" << s.color
            << "' font-family='sans-serif' font-size='11'>" << s.label << "</text>\n";
        label_y += 14;
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace tfmm
