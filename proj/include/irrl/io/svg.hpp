#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "irrl/errors.hpp"
#include "irrl/io/csv.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

struct CurveSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct TrajectorySeries {
    int agent_id = 0;
    std::vector<Vec2> points;
};

namespace svg_detail {

inline const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
inline constexpr int kPaletteSize = 10;

struct Bounds {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

    void expand(double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }

    void pad() {
        if (xmax - xmin < 1e-12) {
            xmin -= 1.0;
            xmax += 1.0;
        }
        if (ymax - ymin < 1e-12) {
            ymin -= 1.0;
            ymax += 1.0;
        }
        const double px = 0.05 * (xmax - xmin);
        const double py = 0.05 * (ymax - ymin);
        xmin -= px;
        xmax += px;
        ymin -= py;
        ymax += py;
    }
};

/// Data -> pixel mapping published as an SVG group transform, so geometry
/// elements keep their raw data coordinates.
struct Frame {
    static constexpr double kWidth = 800, kHeight = 560;
    static constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
    Bounds b;
    double sx = 1, sy = 1;

    explicit Frame(Bounds bounds) : b(bounds) {
        sx = (kWidth - kLeft - kRight) / (b.xmax - b.xmin);
        sy = (kHeight - kTop - kBottom) / (b.ymax - b.ymin);
    }

    double px(double x) const { return kLeft + (x - b.xmin) * sx; }
    double py(double y) const { return kHeight - kBottom - (y - b.ymin) * sy; }

    std::string group_open() const {
        const double e = kLeft - b.xmin * sx;
        const double f = kHeight - kBottom + b.ymin * sy;
        return "<g transform=\"matrix(" + format_double(sx) + " 0 0 " + format_double(-sy) + " " +
               format_double(e) + " " + format_double(f) + ")\">\n";
    }
};

/// Equal-aspect variant for spatial plots.
inline Frame square_frame(Bounds b) {
    b.pad();
    Frame f(b);
    const double s = std::min(f.sx, f.sy);
    const double cx = 0.5 * (b.xmin + b.xmax);
    const double cy = 0.5 * (b.ymin + b.ymax);
    const double hw = 0.5 * (Frame::kWidth - Frame::kLeft - Frame::kRight) / s;
    const double hh = 0.5 * (Frame::kHeight - Frame::kTop - Frame::kBottom) / s;
    Bounds sq;
    sq.xmin = cx - hw;
    sq.xmax = cx + hw;
    sq.ymin = cy - hh;
    sq.ymax = cy + hh;
    return Frame(sq);
}

inline std::string points_attr(const std::vector<double>& x, const std::vector<double>& y) {
    std::string pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) pts += ' ';
        pts += format_double(x[i]) + "," + format_double(y[i]);
    }
    return pts;
}

inline std::string points_attr(const std::vector<Vec2>& p) {
    std::string pts;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) pts += ' ';
        pts += format_double(p[i].x) + "," + format_double(p[i].y);
    }
    return pts;
}

inline void open_svg(std::ofstream& out, const std::string& title) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::kWidth << "\" height=\""
        << Frame::kHeight << "\" viewBox=\"0 0 " << Frame::kWidth << " " << Frame::kHeight
        << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << Frame::kWidth / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
}

inline void axes(std::ofstream& out, const Frame& f, const std::string& xlabel,
                 const std::string& ylabel) {
    out << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<line x1=\"" << f.px(f.b.xmin) << "\" y1=\"" << f.py(f.b.ymin) << "\" x2=\""
        << f.px(f.b.xmax) << "\" y2=\"" << f.py(f.b.ymin) << "\"/>\n";
    out << "<line x1=\"" << f.px(f.b.xmin) << "\" y1=\"" << f.py(f.b.ymin) << "\" x2=\""
        << f.px(f.b.xmin) << "\" y2=\"" << f.py(f.b.ymax) << "\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double tx = f.b.xmin + (f.b.xmax - f.b.xmin) * i / 5.0;
        const double ty = f.b.ymin + (f.b.ymax - f.b.ymin) * i / 5.0;
        char lab[32];
        std::snprintf(lab, sizeof(lab), "%.4g", tx);
        out << "<line x1=\"" << f.px(tx) << "\" y1=\"" << f.py(f.b.ymin) << "\" x2=\"" << f.px(tx)
            << "\" y2=\"" << f.py(f.b.ymin) + 4 << "\"/>\n";
        out << "<text x=\"" << f.px(tx) << "\" y=\"" << f.py(f.b.ymin) + 16
            << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" << lab << "</text>\n";
        std::snprintf(lab, sizeof(lab), "%.4g", ty);
        out << "<line x1=\"" << f.px(f.b.xmin) - 4 << "\" y1=\"" << f.py(ty) << "\" x2=\""
            << f.px(f.b.xmin) << "\" y2=\"" << f.py(ty) << "\"/>\n";
        out << "<text x=\"" << f.px(f.b.xmin) - 7 << "\" y=\"" << f.py(ty) + 4
            << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">" << lab << "</text>\n";
    }
    out << "<text x=\"" << (f.px(f.b.xmin) + f.px(f.b.xmax)) / 2 << "\" y=\""
        << Frame::kHeight - 12 << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">"
        << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << (f.py(f.b.ymin) + f.py(f.b.ymax)) / 2
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\" transform=\"rotate(-90 16 "
        << (f.py(f.b.ymin) + f.py(f.b.ymax)) / 2 << ")\">" << ylabel << "</text>\n";
    out << "</g>\n";
}

}  // namespace svg_detail

/// One polyline per series, shared axes, legend in the top-right corner.
inline void write_curves_svg(const std::string& path, const std::vector<CurveSeries>& series,
                             const std::string& title, const std::string& xlabel,
                             const std::string& ylabel) {
    using namespace svg_detail;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    Bounds b;
    bool any = false;
    for (const CurveSeries& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                b = Bounds{s.x[i], s.x[i], s.y[i], s.y[i]};
                any = true;
            } else {
                b.expand(s.x[i], s.y[i]);
            }
        }
    }
    b.pad();
    const Frame f(b);
    open_svg(out, title);
    axes(out, f, xlabel, ylabel);
    out << f.group_open();
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << "<polyline class=\"curve\" fill=\"none\" stroke=\""
            << kPalette[k % kPaletteSize]
            << "\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\" points=\""
            << points_attr(series[k].x, series[k].y) << "\"/>\n";
    }
    out << "</g>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double ly = 44 + 16 * static_cast<double>(k);
        out << "<rect x=\"" << Frame::kWidth - 150 << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"3\" fill=\"" << kPalette[k % kPaletteSize] << "\"/>\n";
        out << "<text x=\"" << Frame::kWidth - 132 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[k].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

/// Mean curve with a +-std band across seeds.
inline void write_band_svg(const std::string& path, const std::vector<double>& x,
                           const std::vector<double>& mean, const std::vector<double>& stddev,
                           const std::string& title, const std::string& xlabel,
                           const std::string& ylabel) {
    using namespace svg_detail;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    Bounds b;
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!any) {
            b = Bounds{x[i], x[i], mean[i] - stddev[i], mean[i] - stddev[i]};
            any = true;
        }
        b.expand(x[i], mean[i] - stddev[i]);
        b.expand(x[i], mean[i] + stddev[i]);
    }
    b.pad();
    const Frame f(b);
    open_svg(out, title);
    axes(out, f, xlabel, ylabel);
    out << f.group_open();
    std::string pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!pts.empty()) pts += ' ';
        pts += format_double(x[i]) + "," + format_double(mean[i] + stddev[i]);
    }
    for (std::size_t i = x.size(); i-- > 0;) {
        pts += ' ';
        pts += format_double(x[i]) + "," + format_double(mean[i] - stddev[i]);
    }
    out << "<polygon class=\"band\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" "
           "points=\""
        << pts << "\"/>\n";
    out << "<polyline class=\"mean\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
           "vector-effect=\"non-scaling-stroke\" points=\""
        << points_attr(x, mean) << "\"/>\n";
    out << "</g>\n</svg>\n";
}

/// Spatial picture of one episode: robot path in black, pedestrians colored,
/// start dots, and the robot's goal drawn at the goal-tolerance radius.
inline void write_trajectory_svg(const std::string& path,
                                 const std::vector<TrajectorySeries>& agents, const Vec2& goal,
                                 double goal_tolerance, const std::string& title) {
    using namespace svg_detail;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    Bounds b{goal.x, goal.x, goal.y, goal.y};
    for (const TrajectorySeries& a : agents) {
        for (const Vec2& p : a.points) b.expand(p.x, p.y);
    }
    const Frame f = square_frame(b);
    open_svg(out, title);
    axes(out, f, "x [m]", "y [m]");
    out << f.group_open();
    out << "<circle class=\"goal\" cx=\"" << format_double(goal.x) << "\" cy=\""
        << format_double(goal.y) << "\" r=\"" << format_double(goal_tolerance)
        << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\" "
           "vector-effect=\"non-scaling-stroke\"/>\n";
    int human_color = 0;
    for (const TrajectorySeries& a : agents) {
        const bool robot = a.agent_id == 0;
        const char* color = robot ? "#000000" : kPalette[human_color++ % kPaletteSize];
        out << "<polyline class=\"" << (robot ? "robot" : "human")
            << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << (robot ? 2 : 1.2)
            << "\" vector-effect=\"non-scaling-stroke\" points=\"" << points_attr(a.points)
            << "\"/>\n";
        if (!a.points.empty()) {
            out << "<circle class=\"start\" cx=\"" << format_double(a.points.front().x)
                << "\" cy=\"" << format_double(a.points.front().y)
                << "\" r=\"0.07\" fill=\"" << color << "\"/>\n";
        }
    }
    out << "</g>\n</svg>\n";
}

}  // namespace irrl
