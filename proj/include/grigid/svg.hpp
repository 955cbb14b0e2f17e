#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "grigid/affine.hpp"
#include "grigid/direction.hpp"
#include "grigid/geometry.hpp"
#include "grigid/graph.hpp"
#include "grigid/point_set.hpp"

namespace grigid {

struct SvgStyle {
    int width{800};
    int height{500};
    double margin{48.0};
    std::string graph_color{"#1f6feb"};
    std::string overlay_color{"#d1242f"};
    std::string accent_color{"#2da44e"};
    std::string ink_color{"#24292f"};
    double stroke_width{1.0};
    double point_radius{1.2};
};

/// Deterministic SVG 1.1 figure builder. Content is collected in data
/// coordinates; the data box is fitted to the viewport at render time.
/// Interval and stage overlays live in fixed pixel lanes under the plot.
class SvgFigure {
public:
    explicit SvgFigure(SvgStyle style = {}) : style_(style) {}

    void add_graph(const SampledGraph& g) {
        graphs_.push_back(&g);
        for (std::size_t i = 0; i < g.xs.size(); ++i) grow(g.xs[i], g.ys[i]);
    }

    void add_point_set(const PointSet& ps) {
        points_.push_back(&ps);
        for (const Vec2& p : ps.points) grow(p.x, p.y);
    }

    void add_rectangles(std::vector<Rectangle> rects) {
        for (const Rectangle& r : rects) {
            grow(r.x.lo, r.y.lo);
            grow(r.x.hi, r.y.hi);
        }
        rects_.insert(rects_.end(), rects.begin(), rects.end());
    }

    /// Interval family drawn as bars in an overlay lane below the plot.
    void add_intervals(std::vector<Interval> family) {
        for (const Interval& iv : family) grow_x(iv.lo), grow_x(iv.hi);
        interval_lanes_.push_back(std::move(family));
    }

    /// Stage intervals as bars plus one marker per removed gap (pass the
    /// cumulative gap list to reproduce the full construction picture).
    void add_cantor_stage(const CantorStage& stage, std::vector<GapRecord> all_gaps) {
        for (const Interval& iv : stage.intervals) grow_x(iv.lo), grow_x(iv.hi);
        cantor_stage_ = stage;
        cantor_gaps_ = std::move(all_gaps);
        has_cantor_ = true;
    }

    /// Unit circle with one tick per direction; N/S marked.
    void add_direction_set(const DirectionSet& d) {
        directions_.push_back(&d);
        grow(-1.25, -1.25);
        grow(1.25, 1.25);
    }

    std::string render() const {
        std::ostringstream out;
        const double w = style_.width, h = style_.height, m = style_.margin;
        double xlo = xlo_, xhi = xhi_, ylo = ylo_, yhi = yhi_;
        if (!(xhi > xlo)) xhi = xlo + 1.0;
        if (!(yhi > ylo)) {
            ylo -= 0.5;
            yhi += 0.5;
        }
        const double sx = (w - 2.0 * m) / (xhi - xlo);
        const double sy = (h - 2.0 * m) / (yhi - ylo);
        auto X = [&](double x) { return m + (x - xlo) * sx; };
        auto Y = [&](double y) { return h - m - (y - ylo) * sy; };

        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
            << style_.width << "\" height=\"" << style_.height << "\" viewBox=\"0 0 "
            << style_.width << ' ' << style_.height << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

        // axes box
        out << "<rect class=\"plot-frame\" x=\"" << fmt(m) << "\" y=\"" << fmt(m)
            << "\" width=\"" << fmt(w - 2 * m) << "\" height=\"" << fmt(h - 2 * m)
            << "\" fill=\"none\" stroke=\"" << style_.ink_color
            << "\" stroke-width=\"0.5\"/>\n";

        for (const Rectangle& r : rects_) {
            out << "<rect class=\"frame-rect\" x=\"" << fmt(X(r.x.lo)) << "\" y=\""
                << fmt(Y(r.y.hi)) << "\" width=\"" << fmt((r.x.hi - r.x.lo) * sx)
                << "\" height=\"" << fmt(std::max(0.5, (r.y.hi - r.y.lo) * sy))
                << "\" fill=\"none\" stroke=\"" << style_.overlay_color
                << "\" stroke-width=\"" << fmt(style_.stroke_width) << "\"/>\n";
        }

        for (const SampledGraph* g : graphs_) {
            out << "<polyline class=\"graph-polyline\" fill=\"none\" stroke=\""
                << style_.graph_color << "\" stroke-width=\"" << fmt(style_.stroke_width)
                << "\" points=\"";
            for (std::size_t i = 0; i < g->xs.size(); ++i) {
                if (i) out << ' ';
                out << fmt(X(g->xs[i])) << ',' << fmt(Y(g->ys[i]));
            }
            out << "\"/>\n";
        }

        for (const PointSet* ps : points_) {
            for (const Vec2& p : ps->points)
                out << "<circle class=\"point\" cx=\"" << fmt(X(p.x)) << "\" cy=\""
                    << fmt(Y(p.y)) << "\" r=\"" << fmt(style_.point_radius) << "\" fill=\""
                    << style_.graph_color << "\"/>\n";
        }

        // overlay lanes in pixel space below the plot
        double lane_y = h - m + 12.0;
        for (const auto& family : interval_lanes_) {
            for (const Interval& iv : family)
                out << "<rect class=\"interval-bar\" x=\"" << fmt(X(iv.lo)) << "\" y=\""
                    << fmt(lane_y) << "\" width=\"" << fmt(std::max(0.5, iv.length() * sx))
                    << "\" height=\"6\" fill=\"" << style_.accent_color
                    << "\" fill-opacity=\"0.8\"/>\n";
            lane_y += 10.0;
        }
        if (has_cantor_) {
            for (const Interval& iv : cantor_stage_.intervals)
                out << "<rect class=\"cantor-interval\" x=\"" << fmt(X(iv.lo)) << "\" y=\""
                    << fmt(lane_y) << "\" width=\"" << fmt(std::max(0.5, iv.length() * sx))
                    << "\" height=\"6\" fill=\"" << style_.ink_color << "\"/>\n";
            for (const GapRecord& gr : cantor_gaps_)
                out << "<line class=\"cantor-gap\" x1=\"" << fmt(X(gr.gap.midpoint()))
                    << "\" y1=\"" << fmt(lane_y - 3.0) << "\" x2=\""
                    << fmt(X(gr.gap.midpoint())) << "\" y2=\"" << fmt(lane_y + 9.0)
                    << "\" stroke=\"" << style_.overlay_color << "\" stroke-width=\"1\"/>\n";
        }

        for (const DirectionSet* d : directions_) {
            const double r_out = 1.0, r_in = 0.92;
            out << "<circle class=\"direction-circle\" cx=\"" << fmt(X(0.0)) << "\" cy=\""
                << fmt(Y(0.0)) << "\" r=\"" << fmt(1.0 * sx) << "\" fill=\"none\" stroke=\""
                << style_.ink_color << "\" stroke-width=\"0.75\"/>\n";
            for (double a : d->angles) {
                const double c = std::cos(a), s = std::sin(a);
                out << "<line class=\"direction-tick\" x1=\"" << fmt(X(r_in * c)) << "\" y1=\""
                    << fmt(Y(r_in * s)) << "\" x2=\"" << fmt(X(r_out * c)) << "\" y2=\""
                    << fmt(Y(r_out * s)) << "\" stroke=\"" << style_.graph_color
                    << "\" stroke-width=\"0.5\"/>\n";
            }
            for (double v : {kNorthAngle, kSouthAngle}) {
                out << "<circle class=\"direction-pole\" cx=\"" << fmt(X(std::cos(v)))
                    << "\" cy=\"" << fmt(Y(std::sin(v))) << "\" r=\"2.5\" fill=\""
                    << style_.overlay_color << "\"/>\n";
            }
        }

        out << "</svg>\n";
        return out.str();
    }

private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.8g", v);
        return buf;
    }

    void grow(double x, double y) {
        grow_x(x);
        if (y < ylo_) ylo_ = y;
        if (y > yhi_) yhi_ = y;
    }
    void grow_x(double x) {
        if (x < xlo_) xlo_ = x;
        if (x > xhi_) xhi_ = x;
    }

    SvgStyle style_;
    std::vector<const SampledGraph*> graphs_;
    std::vector<const PointSet*> points_;
    std::vector<Rectangle> rects_;
    std::vector<std::vector<Interval>> interval_lanes_;
    CantorStage cantor_stage_;
    std::vector<GapRecord> cantor_gaps_;
    bool has_cantor_{false};
    std::vector<const DirectionSet*> directions_;
    double xlo_{1e300}, xhi_{-1e300}, ylo_{1e300}, yhi_{-1e300};
};

}  // namespace grigid
