#include "bohmsemi/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bohmsemi/io/errors.hpp"

namespace bohmsemi::io {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 640.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Roughly five ticks at 1, 2 or 5 times a power of ten.
double tick_step(double span) {
    const double raw = span / 5.0;
    const double p = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= raw) return m * p;
    return 10.0 * p;
}

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};
    return colors[i % 6];
}

}  // namespace

void SvgPlot::fit() {
    double xl = std::numeric_limits<double>::infinity(), xh = -xl, yl = xl, yh = -xl;
    for (const auto& s : series) {
        for (double v : s.x) xl = std::min(xl, v), xh = std::max(xh, v);
        for (double v : s.y) yl = std::min(yl, v), yh = std::max(yh, v);
    }
    if (!(xh > xl)) xl -= 1.0, xh += 1.0;
    if (!(yh > yl)) yl -= 1.0, yh += 1.0;
    const double mx = 0.05 * (xh - xl), my = 0.05 * (yh - yl);
    x_min = xl - mx;
    x_max = xh + mx;
    y_min = yl - my;
    y_max = yh + my;
}

std::string SvgPlot::render() const {
    if (!(x_max > x_min) || !(y_max > y_min)) throw IoError("empty plot window");
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<defs><clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n";
    o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";

    const double sx = tick_step(x_max - x_min), sy = tick_step(y_max - y_min);
    o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double x = std::ceil(x_min / sx) * sx; x <= x_max; x += sx)
        o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(x)) << "\" y2=\""
          << num(kTop + ph) << "\"/>\n";
    for (double y = std::ceil(y_min / sy) * sy; y <= y_max; y += sy)
        o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
          << num(py(y)) << "\"/>\n";
    o << "</g>\n";
    o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double x = std::ceil(x_min / sx) * sx; x <= x_max; x += sx)
        o << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">" << tick(x)
          << "</text>\n";
    for (double y = std::ceil(y_min / sy) * sy; y <= y_max; y += sy)
        o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
          << "</text>\n";
    o << "</g>\n";
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(x_label) << "</text>\n";
    o << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\" transform=\"rotate(-90 18 " << num(kTop + ph / 2) << ")\">" << escape(y_label)
      << "</text>\n";

    o << "<g clip-path=\"url(#plot)\" fill=\"none\">\n";
    std::size_t highlighted = 0;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& s : series) {
            if (s.highlight != (pass == 1) || s.x.empty()) continue;
            const std::string color = s.highlight ? palette(highlighted++) : "#999999";
            o << "<polyline stroke=\"" << color << "\" stroke-width=\"" << (s.highlight ? "2" : "1") << "\"";
            if (!s.label.empty()) o << " data-label=\"" << escape(s.label) << "\"";
            o << " points=\"";
            for (std::size_t k = 0; k < s.x.size(); ++k) {
                if (k) o << ' ';
                o << num(px(s.x[k])) << ',' << num(py(s.y[k]));
            }
            o << "\"/>\n";
        }
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

void SvgPlot::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << render();
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace bohmsemi::io
