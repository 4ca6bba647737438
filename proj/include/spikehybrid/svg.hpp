#ifndef SPIKEHYBRID_SVG_HPP
#define SPIKEHYBRID_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace spikehybrid::svg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    double width = 1.2;
    bool dashed = false;
    std::vector<std::vector<Point>> pieces; ///< drawn as separate polylines (breaks at jumps)
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return p;
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

inline double nice_step(double span, int target) {
    const double raw = span / std::max(1, target);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

struct Bounds {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity(), y1 = -std::numeric_limits<double>::infinity();

    void add(const Point& p) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return;
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    void finish() {
        if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0;
        if (!(y1 >= y0)) y0 = 0.0, y1 = 1.0;
        if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
        if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
        const double py = 0.05 * (y1 - y0);
        y0 -= py;
        y1 += py;
    }
};

inline void render_panel(std::string& out, const Panel& p, double ox, double oy, double w, double h) {
    const double ml = 64, mr = 16, mt = 28, mb = 44;
    const double pw = w - ml - mr, ph = h - mt - mb;
    Bounds b;
    for (const auto& s : p.series)
        for (const auto& piece : s.pieces)
            for (const auto& pt : piece) b.add(pt);
    b.finish();
    auto sx = [&](double x) { return ox + ml + (x - b.x0) / (b.x1 - b.x0) * pw; };
    auto sy = [&](double y) { return oy + mt + (1.0 - (y - b.y0) / (b.y1 - b.y0)) * ph; };

    out += "<rect x=\"" + num(ox + ml) + "\" y=\"" + num(oy + mt) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    const double xs = nice_step(b.x1 - b.x0, 6), ys = nice_step(b.y1 - b.y0, 5);
    for (double v = std::ceil(b.x0 / xs) * xs; v <= b.x1 + 1e-12; v += xs) {
        out += "<line x1=\"" + num(sx(v)) + "\" y1=\"" + num(oy + mt + ph) + "\" x2=\"" + num(sx(v)) + "\" y2=\"" +
               num(oy + mt) + "\" stroke=\"#e5e5e5\"/>\n";
        out += "<text x=\"" + num(sx(v)) + "\" y=\"" + num(oy + mt + ph + 16) + "\" font-size=\"11\" text-anchor=\"middle\">" +
               tick_label(v) + "</text>\n";
    }
    for (double v = std::ceil(b.y0 / ys) * ys; v <= b.y1 + 1e-12; v += ys) {
        out += "<line x1=\"" + num(ox + ml) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" + num(ox + ml + pw) + "\" y2=\"" +
               num(sy(v)) + "\" stroke=\"#e5e5e5\"/>\n";
        out += "<text x=\"" + num(ox + ml - 6) + "\" y=\"" + num(sy(v) + 4) + "\" font-size=\"11\" text-anchor=\"end\">" +
               tick_label(v) + "</text>\n";
    }
    out += "<text x=\"" + num(ox + ml + pw / 2) + "\" y=\"" + num(oy + 18) + "\" font-size=\"13\" text-anchor=\"middle\">" +
           escape(p.title) + "</text>\n";
    out += "<text x=\"" + num(ox + ml + pw / 2) + "\" y=\"" + num(oy + h - 8) + "\" font-size=\"12\" text-anchor=\"middle\">" +
           escape(p.x_label) + "</text>\n";
    out += "<text x=\"" + num(ox + 14) + "\" y=\"" + num(oy + mt + ph / 2) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " +
           num(ox + 14) + " " + num(oy + mt + ph / 2) + ")\">" + escape(p.y_label) + "</text>\n";

    double ly = oy + mt + 14;
    for (const auto& s : p.series) {
        const std::string style = "fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + num(s.width) + "\"" +
                                  (s.dashed ? " stroke-dasharray=\"5,3\"" : "");
        for (const auto& piece : s.pieces) {
            if (piece.empty()) continue;
            out += "<polyline " + style + " points=\"";
            for (const auto& pt : piece) out += num(sx(pt.x)) + "," + num(sy(pt.y)) + " ";
            out += "\"/>\n";
        }
        if (!s.label.empty()) {
            const double lx = ox + ml + pw - 120;
            out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 18) + "\" y2=\"" + num(ly - 4) +
                   "\" " + style + "/>\n";
            out += "<text x=\"" + num(lx + 24) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" + escape(s.label) + "</text>\n";
            ly += 15;
        }
    }
}

} // namespace detail

/// Renders panels stacked vertically into a standalone SVG document.
inline std::string render(const std::vector<Panel>& panels, double width = 720, double panel_height = 260) {
    const double h = panel_height * static_cast<double>(std::max<std::size_t>(1, panels.size()));
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) + "\" height=\"" +
                      detail::num(h) + "\" viewBox=\"0 0 " + detail::num(width) + " " + detail::num(h) +
                      "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        detail::render_panel(out, panels[i], 0.0, panel_height * static_cast<double>(i), width, panel_height);
    out += "</svg>\n";
    return out;
}

/// Keeps at most max_points evenly spaced points of a piece (always including both ends).
inline std::vector<Point> decimate(const std::vector<Point>& pts, std::size_t max_points = 2000) {
    if (pts.size() <= max_points || max_points < 2) return pts;
    std::vector<Point> out;
    out.reserve(max_points);
    for (std::size_t k = 0; k < max_points; ++k) out.push_back(pts[k * (pts.size() - 1) / (max_points - 1)]);
    return out;
}

} // namespace spikehybrid::svg

#endif // SPIKEHYBRID_SVG_HPP
