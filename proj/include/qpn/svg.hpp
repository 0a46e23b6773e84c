// svg.hpp — static SVG figures over the CSV data: line plots with shaded
// regions and marching-squares contour plots. Output is a pure function of
// the input data (no timestamps), so figures are byte-reproducible.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qpn/errors.hpp"

namespace qpn {

namespace svg_detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace svg_detail

// ------------------------------- line plots ---------------------------------

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x, y;
};

struct Span {
    double x0 = 0.0, x1 = 0.0;
    std::string fill;
    std::string label;
};

class LinePlot {
public:
    LinePlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(Series s) {
        if (s.x.size() != s.y.size()) throw validation_error("LinePlot: x/y size mismatch");
        series_.push_back(std::move(s));
    }
    void add_span(Span s) { spans_.push_back(std::move(s)); }

    std::string render(int width = 900, int height = 520) const {
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                xmin = std::min(xmin, s.x[i]); xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]); ymax = std::max(ymax, s.y[i]);
            }
        if (!(xmax > xmin)) { xmin = 0.0; xmax = 1.0; }
        if (!(ymax > ymin)) { ymin = 0.0; ymax = 1.0; }
        const double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad; ymax += ypad;

        const double ml = 70, mr = 20, mt = 40, mb = 50;
        const double pw = width - ml - mr, ph = height - mt - mb;
        auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
        auto py = [&](double y) { return mt + ph * (ymax - y) / (ymax - ymin); };

        std::ostringstream o;
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
          << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
        o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        using svg_detail::num;
        for (const auto& sp : spans_) {
            const double a = std::max(xmin, sp.x0), b = std::min(xmax, sp.x1);
            if (!(b > a)) continue;
            o << "<rect class=\"span\" x=\"" << num(px(a)) << "\" y=\"" << num(mt) << "\" width=\""
              << num(px(b) - px(a)) << "\" height=\"" << num(ph) << "\" fill=\"" << sp.fill
              << "\" fill-opacity=\"0.45\"/>\n";
            if (!sp.label.empty())
                o << "<text x=\"" << num(0.5 * (px(a) + px(b))) << "\" y=\"" << num(mt + 16)
                  << "\" text-anchor=\"middle\" font-size=\"12\">" << sp.label << "</text>\n";
        }
        // axes + ticks
        o << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
          << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 5; ++k) {
            const double xv = xmin + (xmax - xmin) * k / 5.0;
            const double yv = ymin + (ymax - ymin) * k / 5.0;
            o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(height - mb + 18)
              << "\" text-anchor=\"middle\" font-size=\"11\">" << num(xv) << "</text>\n";
            o << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(py(yv) + 4)
              << "\" text-anchor=\"end\" font-size=\"11\">" << num(yv) << "</text>\n";
        }
        o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 12)
          << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n";
        o << "<text x=\"16\" y=\"" << num(mt + ph / 2)
          << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
          << num(mt + ph / 2) << ")\">" << ylabel_ << "</text>\n";
        o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
          << "font-size=\"15\">" << title_ << "</text>\n";

        double ly = mt + 14;
        for (const auto& s : series_) {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) o << ' ';
                o << num(px(s.x[i])) << ',' << num(py(s.y[i]));
            }
            o << "\"/>\n";
            if (!s.label.empty()) {
                o << "<text x=\"" << num(width - mr - 8) << "\" y=\"" << num(ly)
                  << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">"
                  << s.label << "</text>\n";
                ly += 15;
            }
        }
        o << "</svg>\n";
        return o.str();
    }

private:
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
    std::vector<Span> spans_;
};

// ---------------------------- contour extraction ----------------------------

using ContourPoint = std::pair<double, double>;
using Polyline = std::vector<ContourPoint>;

// Marching squares on values[iy * nx + ix] sampled at (xs[ix], ys[iy]);
// returns chained iso-lines for the given level.
inline std::vector<Polyline> contour_lines(const std::vector<double>& xs,
                                           const std::vector<double>& ys,
                                           const std::vector<double>& values, double level) {
    const std::size_t nx = xs.size(), ny = ys.size();
    if (values.size() != nx * ny) throw validation_error("contour_lines: field size mismatch");
    if (nx < 2 || ny < 2) throw validation_error("contour_lines: grid too small");

    auto v = [&](std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; };
    auto lerp = [&](double a, double b, double va, double vb) {
        const double t = (level - va) / (vb - va);
        return a + t * (b - a);
    };

    std::vector<std::pair<ContourPoint, ContourPoint>> segs;
    for (std::size_t iy = 0; iy + 1 < ny; ++iy)
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const double v00 = v(ix, iy), v10 = v(ix + 1, iy);
            const double v01 = v(ix, iy + 1), v11 = v(ix + 1, iy + 1);
            int cas = 0;
            if (v00 > level) cas |= 1;
            if (v10 > level) cas |= 2;
            if (v11 > level) cas |= 4;
            if (v01 > level) cas |= 8;
            if (cas == 0 || cas == 15) continue;

            // crossing points on the four cell edges
            ContourPoint pb{}, pt{}, pl{}, pr{};
            const bool eb = (v00 > level) != (v10 > level);
            const bool et = (v01 > level) != (v11 > level);
            const bool el = (v00 > level) != (v01 > level);
            const bool er = (v10 > level) != (v11 > level);
            if (eb) pb = {lerp(xs[ix], xs[ix + 1], v00, v10), ys[iy]};
            if (et) pt = {lerp(xs[ix], xs[ix + 1], v01, v11), ys[iy + 1]};
            if (el) pl = {xs[ix], lerp(ys[iy], ys[iy + 1], v00, v01)};
            if (er) pr = {xs[ix + 1], lerp(ys[iy], ys[iy + 1], v10, v11)};

            auto add = [&](ContourPoint a, ContourPoint b) { segs.push_back({a, b}); };
            switch (cas) {
                case 1: case 14: add(pl, pb); break;
                case 2: case 13: add(pb, pr); break;
                case 3: case 12: add(pl, pr); break;
                case 4: case 11: add(pr, pt); break;
                case 6: case 9:  add(pb, pt); break;
                case 7: case 8:  add(pl, pt); break;
                case 5: case 10: add(pl, pb); add(pr, pt); break;  // saddle
                default: break;
            }
        }

    // chain segments into polylines by matching quantized endpoints; contours
    // passing exactly through a grid vertex produce zero-length segments,
    // which would fragment the chain
    auto key = [](const ContourPoint& p) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.9g|%.9g", p.first + 0.0, p.second + 0.0);
        return std::string(buf);
    };
    std::erase_if(segs, [&](const auto& s) { return key(s.first) == key(s.second); });
    std::multimap<std::string, std::size_t> ends;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        ends.insert({key(segs[i].first), i});
        ends.insert({key(segs[i].second), i});
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> lines;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        Polyline line{segs[i].first, segs[i].second};
        for (int dir = 0; dir < 2; ++dir) {
            for (;;) {
                const ContourPoint tip = (dir == 0) ? line.back() : line.front();
                const auto range = ends.equal_range(key(tip));
                std::size_t next = segs.size();
                for (auto it = range.first; it != range.second; ++it)
                    if (!used[it->second]) { next = it->second; break; }
                if (next == segs.size()) break;
                used[next] = true;
                const auto& s = segs[next];
                const ContourPoint add = (key(s.first) == key(tip)) ? s.second : s.first;
                if (dir == 0) line.push_back(add);
                else line.insert(line.begin(), add);
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

inline bool is_closed(const Polyline& line, double tol = 1e-9) {
    if (line.size() < 4) return false;
    return std::abs(line.front().first - line.back().first) <= tol &&
           std::abs(line.front().second - line.back().second) <= tol;
}

// even-odd ray cast; the polyline is treated as closed
inline bool encircles(const Polyline& line, double x, double y) {
    bool inside = false;
    for (std::size_t i = 0, j = line.size() - 1; i < line.size(); j = i++) {
        const auto& a = line[i];
        const auto& b = line[j];
        if ((a.second > y) != (b.second > y)) {
            const double xc = a.first + (y - a.second) * (b.first - a.first) /
                                            (b.second - a.second);
            if (x < xc) inside = !inside;
        }
    }
    return inside;
}

// contour plot over a 2-D field slice
inline std::string render_contour_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                                      const std::vector<double>& values,
                                      const std::vector<double>& levels, const std::string& title,
                                      const std::string& xlabel, const std::string& ylabel,
                                      int width = 700, int height = 620) {
    using svg_detail::num;
    const double xmin = xs.front(), xmax = xs.back();
    const double ymin = ys.front(), ymax = ys.back();
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return mt + ph * (ymax - y) / (ymax - ymin); };

    static const char* palette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 5.0;
        const double yv = ymin + (ymax - ymin) * k / 5.0;
        o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(height - mb + 18)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << num(xv) << "</text>\n";
        o << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(py(yv) + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << num(yv) << "</text>\n";
    }
    o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    o << "<text x=\"16\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << num(mt + ph / 2) << ")\">" << ylabel << "</text>\n";
    o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";

    for (std::size_t li = 0; li < levels.size(); ++li) {
        const auto lines = contour_lines(xs, ys, values, levels[li]);
        const char* color = palette[li % 5];
        for (const auto& line : lines) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (i) o << ' ';
                o << num(px(line[i].first)) << ',' << num(py(line[i].second));
            }
            o << "\"/>\n";
        }
        o << "<text x=\"" << num(width - mr - 8) << "\" y=\"" << num(mt + 14 + 15.0 * li)
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">level "
          << num(levels[li]) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace qpn
