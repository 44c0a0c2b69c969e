#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "cvqt/errors.hpp"
#include "cvqt/experiment.hpp"

namespace cvqt {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginBottom = 50;
constexpr int kMarginTop = 20;
constexpr int kMarginRight = 20;

struct Range {
    double lo = 0.0, hi = 1.0;
    double clamp01(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.5; }
};

Range find_range(const std::vector<double>& v) {
    Range r{v.front(), v.front()};
    for (double x : v) {
        r.lo = std::min(r.lo, x);
        r.hi = std::max(r.hi, x);
    }
    if (r.hi == r.lo) r.hi = r.lo + 1.0;
    return r;
}

// small viridis-like ramp
void color(double t, int& red, int& green, int& blue) {
    t = std::clamp(t, 0.0, 1.0);
    red = static_cast<int>(255.0 * std::clamp(1.3 * t - 0.3 + 0.25 * (1.0 - t) * t, 0.0, 1.0));
    green = static_cast<int>(255.0 * std::clamp(0.1 + 0.8 * t, 0.0, 1.0));
    blue = static_cast<int>(255.0 * std::clamp(0.45 + 0.45 * std::cos(3.0 * t), 0.0, 1.0));
}

void header(std::ostream& os) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostream& os, const Range& xr, const Range& yr, const std::string& xl,
          const std::string& yl) {
    const int x0 = kMarginLeft, y0 = kHeight - kMarginBottom;
    const int x1 = kWidth - kMarginRight, y1 = kMarginTop;
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
       << "\" stroke=\"black\"/>\n";
    os.precision(4);
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-size=\"14\">" << xl << "</text>\n"
       << "<text x=\"16\" y=\"" << (y0 + y1) / 2
       << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
       << (y0 + y1) / 2 << ")\">" << yl << "</text>\n";
    os << "<text x=\"" << x0 << "\" y=\"" << y0 + 18 << "\" font-size=\"11\">" << xr.lo
       << "</text>\n"
       << "<text x=\"" << x1 - 30 << "\" y=\"" << y0 + 18 << "\" font-size=\"11\">" << xr.hi
       << "</text>\n"
       << "<text x=\"" << x0 - 45 << "\" y=\"" << y0 << "\" font-size=\"11\">" << yr.lo
       << "</text>\n"
       << "<text x=\"" << x0 - 45 << "\" y=\"" << y1 + 10 << "\" font-size=\"11\">" << yr.hi
       << "</text>\n";
}

}  // namespace

void write_line_svg(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& x_label, const std::string& y_label) {
    if (x.empty() || x.size() != y.size())
        throw ParameterError("write_line_svg: mismatched or empty series");
    const Range xr = find_range(x), yr = find_range(y);
    header(os);
    axes(os, xr, yr, x_label, y_label);
    os << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    os.precision(7);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double px = kMarginLeft + xr.clamp01(x[i]) * (kWidth - kMarginLeft - kMarginRight);
        const double py = (kHeight - kMarginBottom) -
                          yr.clamp01(y[i]) * (kHeight - kMarginBottom - kMarginTop);
        os << px << ',' << py << ' ';
    }
    os << "\"/>\n</svg>\n";
}

void write_heatmap_svg(std::ostream& os, const std::vector<double>& x,
                       const std::vector<double>& y,
                       const std::vector<std::vector<double>>& value_rows,
                       const std::string& x_label, const std::string& y_label) {
    if (x.empty() || y.empty() || value_rows.size() != x.size())
        throw ParameterError("write_heatmap_svg: mismatched grid");
    Range vr{value_rows[0][0], value_rows[0][0]};
    for (const auto& row : value_rows)
        for (double v : row) {
            vr.lo = std::min(vr.lo, v);
            vr.hi = std::max(vr.hi, v);
        }
    if (vr.hi == vr.lo) vr.hi = vr.lo + 1.0;
    const Range xr = find_range(x), yr = find_range(y);
    header(os);
    const double cw = static_cast<double>(kWidth - kMarginLeft - kMarginRight) / x.size();
    const double ch = static_cast<double>(kHeight - kMarginBottom - kMarginTop) / y.size();
    os.precision(7);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) {
            int r, g, b;
            color(vr.clamp01(value_rows[i][j]), r, g, b);
            const double px = kMarginLeft + i * cw;
            const double py = (kHeight - kMarginBottom) - (j + 1) * ch;
            os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cw + 0.5
               << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb(" << r << ',' << g << ',' << b
               << ")\"/>\n";
        }
    axes(os, xr, yr, x_label, y_label);
    os << "</svg>\n";
}

}  // namespace cvqt
