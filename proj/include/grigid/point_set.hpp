#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grigid/geometry.hpp"
#include "grigid/parallel.hpp"

namespace grigid {

/// Finite multiset of plane points.
struct PointSet {
    std::vector<Vec2> points;

    PointSet() = default;
    explicit PointSet(std::vector<Vec2> pts) : points(std::move(pts)) {
        for (const Vec2& p : points)
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw std::invalid_argument("PointSet: coordinates must be finite");
    }

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// Axis-aligned bounding box; undefined for empty sets.
inline Rectangle bounding_box(const PointSet& ps) {
    if (ps.empty()) throw std::invalid_argument("bounding_box: empty point set");
    double xlo = ps.points[0].x, xhi = xlo, ylo = ps.points[0].y, yhi = ylo;
    for (const Vec2& p : ps.points) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    return {Interval(xlo, xhi), Interval(ylo, yhi)};
}

/// Uniform grid over a point set for exact nearest-neighbor queries, stored
/// as bucket offsets over a flat index array. Acceleration only: candidate
/// distances use the same expression as a linear scan and the ring search
/// never prunes a cell that could hold the minimizer, so query results are
/// identical to brute force.
class GridIndex {
public:
    explicit GridIndex(const std::vector<Vec2>& pts) : pts_(pts) {
        if (pts.empty()) throw std::invalid_argument("GridIndex: empty point set");
        xlo_ = xhi_ = pts[0].x;
        ylo_ = yhi_ = pts[0].y;
        for (const Vec2& p : pts) {
            xlo_ = std::min(xlo_, p.x);
            xhi_ = std::max(xhi_, p.x);
            ylo_ = std::min(ylo_, p.y);
            yhi_ = std::max(yhi_, p.y);
        }
        const double extent = std::max(xhi_ - xlo_, yhi_ - ylo_);
        const double side = std::ceil(std::sqrt(static_cast<double>(pts.size())));
        cell_ = extent > 0.0 ? extent / side : 1.0;
        nx_ = static_cast<int>((xhi_ - xlo_) / cell_) + 1;
        ny_ = static_cast<int>((yhi_ - ylo_) / cell_) + 1;
        const std::size_t cells = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
        offsets_.assign(cells + 1, 0);
        std::vector<int> cx(pts.size()), cy(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cx[i] = cell_of(pts[i].x, xlo_);
            cy[i] = cell_of(pts[i].y, ylo_);
            ++offsets_[flat(cx[i], cy[i]) + 1];
        }
        for (std::size_t c = 0; c < cells; ++c) offsets_[c + 1] += offsets_[c];
        order_.resize(pts.size());
        std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i)
            order_[cursor[flat(cx[i], cy[i])]++] = i;
    }

    /// Squared distance from q to the nearest indexed point.
    double nearest2(Vec2 q) const {
        const int cx = clamp_cell(cell_of(q.x, xlo_), nx_);
        const int cy = clamp_cell(cell_of(q.y, ylo_), ny_);
        double best = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nx_, ny_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            // Once every cell of this ring is farther than the current best,
            // no later ring can improve it.
            if (best < std::numeric_limits<double>::infinity()) {
                const double ring_gap = (static_cast<double>(ring) - 1.0) * cell_;
                if (ring_gap > 0.0 && ring_gap * ring_gap > best) break;
            }
            scan_ring(q, cx, cy, ring, best);
        }
        return best;
    }

private:
    int cell_of(double v, double lo) const {
        return static_cast<int>(std::floor((v - lo) / cell_));
    }
    std::size_t flat(int gx, int gy) const {
        return static_cast<std::size_t>(gy) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(gx);
    }

    void scan_cell(Vec2 q, int gx, int gy, double& best) const {
        const std::size_t c = flat(gx, gy);
        for (std::size_t i = offsets_[c]; i < offsets_[c + 1]; ++i) {
            const double d2 = distance2(q, pts_[order_[i]]);
            if (d2 < best) best = d2;
        }
    }

    void scan_ring(Vec2 q, int cx, int cy, int ring, double& best) const {
        const int x0 = std::max(0, cx - ring), x1 = std::min(nx_ - 1, cx + ring);
        if (ring == 0) {
            if (cx >= 0 && cx < nx_ && cy >= 0 && cy < ny_) scan_cell(q, cx, cy, best);
            return;
        }
        for (int gx = x0; gx <= x1; ++gx) {
            if (cy - ring >= 0) scan_cell(q, gx, cy - ring, best);
            if (cy + ring < ny_) scan_cell(q, gx, cy + ring, best);
        }
        for (int gy = std::max(0, cy - ring + 1); gy <= std::min(ny_ - 1, cy + ring - 1); ++gy) {
            if (cx - ring >= 0) scan_cell(q, cx - ring, gy, best);
            if (cx + ring < nx_) scan_cell(q, cx + ring, gy, best);
        }
    }

    static int clamp_cell(int c, int n) { return c < 0 ? 0 : (c >= n ? n - 1 : c); }

    const std::vector<Vec2>& pts_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> order_;
    double xlo_, xhi_, ylo_, yhi_, cell_;
    int nx_, ny_;
};

/// Directed Hausdorff term max_{a in A} min_{b in B} |a-b|, squared.
inline double directed_hausdorff2(const PointSet& a, const GridIndex& b_index) {
    std::vector<double> partial(a.size(), 0.0);
    parallel_chunks(a.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            partial[i] = b_index.nearest2(a.points[i]);
    });
    double worst = 0.0;
    for (double d2 : partial) worst = std::max(worst, d2);
    return worst;
}

/// Hausdorff distance between two finite point sets. Exact: the grid index
/// and the small-size direct loop evaluate identical distance expressions,
/// so acceleration never changes the value.
inline double hausdorff_distance(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff_distance: point sets must be nonempty");
    if (a.size() * b.size() <= 250000) {
        auto directed = [](const PointSet& u, const PointSet& v) {
            double worst = 0.0;
            for (const Vec2& p : u.points) {
                double best = std::numeric_limits<double>::infinity();
                for (const Vec2& q : v.points) best = std::min(best, distance2(p, q));
                worst = std::max(worst, best);
            }
            return worst;
        };
        return std::sqrt(std::max(directed(a, b), directed(b, a)));
    }
    GridIndex ia(a.points), ib(b.points);
    return std::sqrt(std::max(directed_hausdorff2(a, ib), directed_hausdorff2(b, ia)));
}

/// Reference O(|A| * |B|) evaluation used to cross-check the indexed path.
inline double hausdorff_distance_brute(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff_distance: point sets must be nonempty");
    auto directed = [](const PointSet& u, const PointSet& v) {
        double worst = 0.0;
        for (const Vec2& p : u.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& q : v.points) best = std::min(best, distance2(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

namespace detail {
inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

/// CSV with header `x,y`, 17 significant digits.
inline void write_csv(const PointSet& ps, std::ostream& out) {
    out << "x,y\n";
    for (const Vec2& p : ps.points)
        out << detail::format17(p.x) << ',' << detail::format17(p.y) << '\n';
}

inline PointSet read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
    std::vector<Vec2> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_csv: line " + std::to_string(lineno) +
                                     ": expected `x,y`");
        try {
            pts.emplace_back(std::stod(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error("read_csv: line " + std::to_string(lineno) +
                                     ": malformed number");
        }
    }
    return PointSet(std::move(pts));
}

}  // namespace grigid
