#include "mimic/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mimic {

namespace {

constexpr int kCell = 12;
constexpr int kMarginLeft = 44;
constexpr int kMarginTop = 26;
constexpr int kMarginBottom = 30;
constexpr int kMarginRight = 10;

std::string escape_xml(const std::string& s) {
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

}  // namespace

std::string svg_heatmap(const ImportanceMap& map) {
    const int width = kMarginLeft + static_cast<int>(map.length) * kCell + kMarginRight;
    const int height = kMarginTop + static_cast<int>(map.dims) * kCell + kMarginBottom;

    std::ostringstream out;
    char buf[256];
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    out << buf;
    out << "<title>importance map " << escape_xml(map.label) << "</title>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"16\" font-size=\"12\" font-family=\"sans-serif\">label %s"
                  "</text>\n",
                  kMarginLeft, escape_xml(map.label).c_str());
    out << buf;

    for (std::size_t v = 0; v < map.dims; ++v) {
        for (std::size_t t = 0; t < map.length; ++t) {
            const double value = std::clamp(map(v, t), 0.0, 1.0);
            const int gray = static_cast<int>(std::lround(255.0 * (1.0 - value)));
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                          "fill=\"rgb(%d,%d,%d)\"/>\n",
                          kMarginLeft + static_cast<int>(t) * kCell,
                          kMarginTop + static_cast<int>(v) * kCell, kCell, kCell, gray, gray, gray);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"4\" y=\"%d\" font-size=\"10\" font-family=\"sans-serif\">dim %zu"
                      "</text>\n",
                      kMarginTop + static_cast<int>(v) * kCell + kCell - 2, v);
        out << buf;
    }

    const std::size_t tick_step = std::max<std::size_t>(1, map.length / 10);
    for (std::size_t t = 0; t < map.length; t += tick_step) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" font-size=\"10\" font-family=\"sans-serif\">t=%zu"
                      "</text>\n",
                      kMarginLeft + static_cast<int>(t) * kCell,
                      kMarginTop + static_cast<int>(map.dims) * kCell + 14, t);
        out << buf;
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_polyline(const MimicShape& shape) {
    const int plot_w = 360, plot_h = 160;
    const int width = kMarginLeft + plot_w + kMarginRight;
    const int height = kMarginTop + plot_h + kMarginBottom;

    double lo = shape.values[0], hi = shape.values[0];
    for (double x : shape.values) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span = hi - lo > 0.0 ? hi - lo : 1.0;

    std::ostringstream out;
    char buf[256];
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    out << buf;
    std::snprintf(buf, sizeof(buf), "<title>label %s dim %zu support %zu</title>\n",
                  escape_xml(shape.label).c_str(), shape.dimension, shape.support);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"16\" font-size=\"12\" font-family=\"sans-serif\">"
                  "label %s dim %zu support %zu</text>\n",
                  kMarginLeft, escape_xml(shape.label).c_str(), shape.dimension, shape.support);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  kMarginLeft, kMarginTop, plot_w, plot_h);
    out << buf;

    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = shape.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double fx = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5;
        const double fy = (shape.values[i] - lo) / span;
        std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i > 0 ? " " : "",
                      kMarginLeft + fx * plot_w, kMarginTop + (1.0 - fy) * plot_h);
        out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" font-size=\"10\" font-family=\"sans-serif\">"
                  "t=%zu..%zu</text>\n",
                  kMarginLeft, kMarginTop + plot_h + 14, shape.start, shape.start + n);
    out << buf;
    out << "</svg>\n";
    return out.str();
}

}  // namespace mimic
