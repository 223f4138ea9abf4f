#include "iu/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iu/errors.hpp"

namespace iu::svg {

namespace {

constexpr int kW = 640;
constexpr int kH = 440;
constexpr int kMarginL = 64;
constexpr int kMarginR = 16;
constexpr int kMarginT = 36;
constexpr int kMarginB = 48;

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

struct Scale {
    double lo, hi;
    double p0, p1;  // pixel range
    double operator()(double v) const {
        if (hi == lo) return (p0 + p1) / 2;
        return p0 + (v - lo) / (hi - lo) * (p1 - p0);
    }
};

void axis_ticks(std::ostream& os, const Scale& sx, const Scale& sy) {
    const int n = 5;
    for (int i = 0; i <= n; ++i) {
        const double vx = sx.lo + (sx.hi - sx.lo) * i / n;
        const double px = sx(vx);
        os << "<line x1='" << px << "' y1='" << sy.p0 << "' x2='" << px << "' y2='" << sy.p0 + 4
           << "' stroke='#444'/>\n";
        os << "<text x='" << px << "' y='" << sy.p0 + 18
           << "' font-size='11' text-anchor='middle' fill='#444'>" << fmt(vx) << "</text>\n";
        const double vy = sy.lo + (sy.hi - sy.lo) * i / n;
        const double py = sy(vy);
        os << "<line x1='" << sx.p0 - 4 << "' y1='" << py << "' x2='" << sx.p0 << "' y2='" << py
           << "' stroke='#444'/>\n";
        os << "<text x='" << sx.p0 - 7 << "' y='" << py + 4
           << "' font-size='11' text-anchor='end' fill='#444'>" << fmt(vy) << "</text>\n";
    }
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, std::optional<double> ymin,
                      std::optional<double> ymax) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("plot: cannot open '" + path + "' for writing");

    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                any = true;
            }
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min({ylo, s.y[i], s.band && i < s.ylo.size() ? s.ylo[i] : s.y[i]});
            yhi = std::max({yhi, s.y[i], s.band && i < s.yhi.size() ? s.yhi[i] : s.y[i]});
        }
    }
    if (ymin) ylo = *ymin;
    if (ymax) yhi = *ymax;
    if (xhi == xlo) xhi = xlo + 1;
    if (yhi == ylo) yhi = ylo + 1;

    const Scale sx{xlo, xhi, static_cast<double>(kMarginL), static_cast<double>(kW - kMarginR)};
    const Scale sy{ylo, yhi, static_cast<double>(kH - kMarginB), static_cast<double>(kMarginT)};

    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << kW / 2 << "' y='20' font-size='14' text-anchor='middle'>" << esc(title)
       << "</text>\n";
    os << "<rect x='" << kMarginL << "' y='" << kMarginT << "' width='" << kW - kMarginL - kMarginR
       << "' height='" << kH - kMarginT - kMarginB << "' fill='none' stroke='#444'/>\n";
    axis_ticks(os, sx, sy);
    os << "<text x='" << kW / 2 << "' y='" << kH - 10 << "' font-size='12' text-anchor='middle'>"
       << esc(xlabel) << "</text>\n";
    os << "<text x='14' y='" << kH / 2 << "' font-size='12' text-anchor='middle' transform='rotate(-90 14 "
       << kH / 2 << ")'>" << esc(ylabel) << "</text>\n";

    for (const auto& s : series) {
        if (s.band && s.ylo.size() == s.x.size() && s.yhi.size() == s.x.size() && !s.x.empty()) {
            os << "<polygon fill='" << s.color << "' fill-opacity='0.18' stroke='none' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << sx(s.x[i]) << "," << sy(s.yhi[i]) << " ";
            for (std::size_t i = s.x.size(); i-- > 0;)
                os << sx(s.x[i]) << "," << sy(s.ylo[i]) << " ";
            os << "'/>\n";
        }
    }
    int legend_y = kMarginT + 14;
    for (const auto& s : series) {
        if (s.x.empty()) continue;
        os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.6' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
        os << "'/>\n";
        if (!s.label.empty() && series.size() > 1) {
            os << "<line x1='" << kW - kMarginR - 120 << "' y1='" << legend_y << "' x2='"
               << kW - kMarginR - 100 << "' y2='" << legend_y << "' stroke='" << s.color
               << "' stroke-width='2'/>\n";
            os << "<text x='" << kW - kMarginR - 95 << "' y='" << legend_y + 4
               << "' font-size='10'>" << esc(s.label) << "</text>\n";
            legend_y += 14;
        }
    }
    os << "</svg>\n";
    if (!os) throw IoError("plot: write to '" + path + "' failed");
}

void write_xy_chart(const std::string& path, const std::string& title, double side,
                    const std::vector<XyPath>& paths, const std::vector<Disc>& discs) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("plot: cannot open '" + path + "' for writing");
    const int size = 480;
    const int margin = 40;
    const double scale = (size - 2.0 * margin) / side;
    auto px = [&](double x) { return margin + x * scale; };
    auto py = [&](double y) { return size - margin - y * scale; };  // +y is north (up)

    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size << "' height='" << size
       << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << size / 2 << "' y='20' font-size='13' text-anchor='middle'>" << esc(title)
       << "</text>\n";
    os << "<rect x='" << px(0) << "' y='" << py(side) << "' width='" << side * scale
       << "' height='" << side * scale << "' fill='#fcfcfc' stroke='#333'/>\n";
    for (const auto& d : discs) {
        os << "<circle cx='" << px(d.center.x()) << "' cy='" << py(d.center.y()) << "' r='"
           << d.radius * scale << "' fill='" << d.color << "' fill-opacity='0.6'/>\n";
    }
    for (const auto& p : paths) {
        if (p.points.empty()) continue;
        if (p.points.size() == 1) {
            os << "<circle cx='" << px(p.points[0].x()) << "' cy='" << py(p.points[0].y())
               << "' r='3' fill='" << p.color << "'/>\n";
            continue;
        }
        os << "<polyline fill='none' stroke='" << p.color << "' stroke-width='" << p.width
           << "' points='";
        for (const auto& pt : p.points) os << px(pt.x()) << "," << py(pt.y()) << " ";
        os << "'/>\n";
        // start and end markers
        os << "<circle cx='" << px(p.points.front().x()) << "' cy='" << py(p.points.front().y())
           << "' r='3' fill='none' stroke='" << p.color << "'/>\n";
        os << "<circle cx='" << px(p.points.back().x()) << "' cy='" << py(p.points.back().y())
           << "' r='3' fill='" << p.color << "'/>\n";
    }
    os << "</svg>\n";
    if (!os) throw IoError("plot: write to '" + path + "' failed");
}

}  // namespace iu::svg
