#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grigid/geometry.hpp"
#include "grigid/graph.hpp"
#include "grigid/similitude.hpp"

namespace grigid {

inline constexpr double kNorthAngle = 0.5 * kPi;   // direction (0, 1)
inline constexpr double kSouthAngle = 1.5 * kPi;   // direction (0, -1)

/// Finite subset of the unit circle: chord directions of a graph as seen
/// from a base point, sorted in [0, 2*pi).
struct DirectionSet {
    std::vector<double> angles;  // sorted
    std::string source;
};

struct ArcReport {
    bool contains_arc{false};
    std::optional<std::pair<double, double>> witness_arc;  // (start, length)
    double max_gap{0.0};
    double resolution{0.0};
};

/// Default arc-detection resolution for a sample of the given size.
inline double default_arc_resolution(std::size_t sample_count) {
    return sample_count > 0 ? kTwoPi / std::sqrt(static_cast<double>(sample_count))
                            : kTwoPi;
}

/// Chord directions (p - p_star) / |p - p_star| for every grid node outside
/// the exclusion radius. p_star must lie on the graph; directions are exactly
/// vertical only for nodes sharing p_star's column, which the exclusion
/// radius removes.
inline DirectionSet phi_image(const SampledGraph& g, Vec2 p_star,
                              double exclusion_radius = -1.0) {
    g.validate();
    if (exclusion_radius < 0.0) exclusion_radius = 4.0 * g.spacing();
    const double on_graph_tol =
        2.0 * g.eval_error + g.step_modulus() + 1e-12;
    if (p_star.x < 0.0 || p_star.x > 1.0 ||
        std::fabs(g.value_at(p_star.x) - p_star.y) > on_graph_tol)
        throw std::invalid_argument("phi_image: base point does not lie on the graph");

    DirectionSet d;
    d.source = g.name + " @ (" + detail::format17(p_star.x) + ", " +
               detail::format17(p_star.y) + ")";
    d.angles.reserve(g.nodes());
    const double r2 = exclusion_radius * exclusion_radius;
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
        const Vec2 p{g.xs[i], g.ys[i]};
        if (distance2(p, p_star) <= r2) continue;
        d.angles.push_back(normalize_angle(std::atan2(p.y - p_star.y, p.x - p_star.x)));
    }
    if (d.angles.empty())
        throw std::invalid_argument("phi_image: all nodes inside the exclusion radius");
    std::sort(d.angles.begin(), d.angles.end());
    return d;
}

/// Arc detection: the direction set contains an arc when at least 8
/// consecutive circular gaps all stay below `resolution` and span positive
/// length. The witness is the longest such window; max_gap is the largest
/// circular gap overall.
inline ArcReport contains_arc(const DirectionSet& d, double resolution) {
    if (!(resolution > 0.0))
        throw std::invalid_argument("contains_arc: resolution must be positive");
    ArcReport rep;
    rep.resolution = resolution;
    const std::size_t n = d.angles.size();
    if (n < 3) {
        rep.max_gap = kTwoPi;
        return rep;
    }
    std::vector<double> gap(n);
    for (std::size_t i = 0; i + 1 < n; ++i) gap[i] = d.angles[i + 1] - d.angles[i];
    gap[n - 1] = d.angles.front() + kTwoPi - d.angles.back();
    rep.max_gap = *std::max_element(gap.begin(), gap.end());

    // Longest circular run of gaps <= resolution (capped at one full turn).
    double best_len = 0.0;
    std::size_t best_count = 0, best_start = 0;
    std::size_t i = 0;
    while (i < n) {
        if (gap[i] > resolution) {
            ++i;
            continue;
        }
        double len = 0.0;
        std::size_t count = 0, j = i;
        while (count < n && gap[j % n] <= resolution) {
            len += gap[j % n];
            ++count;
            ++j;
        }
        if (count >= 8 && len > best_len) {
            best_len = len;
            best_count = count;
            best_start = i;
        }
        if (j <= i) break;
        i = j > i ? j : i + 1;
        if (count >= n) break;  // whole circle qualifies
    }
    if (best_count >= 8 && best_len > 0.0) {
        rep.contains_arc = true;
        rep.witness_arc = {d.angles[best_start], std::min(best_len, kTwoPi)};
    }
    return rep;
}

struct OrbitCoverResult {
    bool covered{false};
    std::size_t steps{0};           // least N reaching the cover criterion
    double max_gap{0.0};            // largest uncovered gap at termination
    double uncovered_measure{0.0};  // total uncovered length at termination
};

namespace detail {

/// Disjoint closed arcs on [0, 2*pi), kept merged.
class CircleCover {
public:
    void add(double start, double len) {
        start = normalize_angle(start);
        if (len >= kTwoPi) {
            segs_.clear();
            segs_[0.0] = kTwoPi;
            return;
        }
        const double end = start + len;
        if (end <= kTwoPi) {
            insert(start, end);
        } else {
            insert(start, kTwoPi);
            insert(0.0, end - kTwoPi);
        }
    }

    double covered_measure() const {
        double m = 0.0;
        for (const auto& [s, e] : segs_) m += e - s;
        return m;
    }

    double max_gap() const {
        if (segs_.empty()) return kTwoPi;
        double worst = 0.0;
        auto it = segs_.begin();
        double prev_end = it->second;
        for (++it; it != segs_.end(); ++it) {
            worst = std::max(worst, it->first - prev_end);
            prev_end = it->second;
        }
        // wrap-around gap
        worst = std::max(worst, segs_.begin()->first + kTwoPi - prev_end);
        return worst;
    }

    bool contains(double angle) const {
        angle = normalize_angle(angle);
        auto it = segs_.upper_bound(angle);
        if (it != segs_.begin()) {
            --it;
            if (angle <= it->second) return true;
        }
        return false;
    }

private:
    void insert(double s, double e) {
        auto it = segs_.upper_bound(s);
        if (it != segs_.begin()) {
            auto prev = std::prev(it);
            if (prev->second >= s) {
                s = prev->first;
                e = std::max(e, prev->second);
                it = segs_.erase(prev);
            }
        }
        while (it != segs_.end() && it->first <= e) {
            e = std::max(e, it->second);
            it = segs_.erase(it);
        }
        segs_[s] = e;
    }

    std::map<double, double> segs_;
};

}  // namespace detail

/// Rotates the arc J = [arc_start, arc_start + arc_len] by multiples of
/// theta and accumulates the union. Covered once the total uncovered measure
/// drops to eps or below (which also forces every single gap <= eps);
/// otherwise reports the residual at max_steps.
inline OrbitCoverResult rotation_orbit_cover(double arc_start, double arc_len,
                                             double theta, double eps,
                                             std::size_t max_steps) {
    if (!(arc_len > 0.0 && arc_len < kTwoPi))
        throw std::invalid_argument("rotation_orbit_cover: arc_len must lie in (0, 2*pi)");
    if (!(eps > 0.0))
        throw std::invalid_argument("rotation_orbit_cover: eps must be positive");
    detail::CircleCover cover;
    OrbitCoverResult res;
    for (std::size_t i = 0; i <= max_steps; ++i) {
        cover.add(arc_start + static_cast<double>(i) * theta, arc_len);
        const double uncovered = kTwoPi - cover.covered_measure();
        if (uncovered <= eps) {
            res.covered = true;
            res.steps = i;
            res.max_gap = std::max(0.0, cover.max_gap());
            res.uncovered_measure = std::max(0.0, uncovered);
            return res;
        }
    }
    res.covered = false;
    res.steps = max_steps;
    res.max_gap = cover.max_gap();
    res.uncovered_measure = kTwoPi - cover.covered_measure();
    return res;
}

struct InvarianceReport {
    bool forward_ok{true};
    bool backward_ok{true};
    double worst_defect{0.0};
};

namespace detail {

/// Circle distance from `a` to the nearest element of sorted `angles`.
inline double nearest_angle_distance(const std::vector<double>& angles, double a) {
    a = normalize_angle(a);
    auto it = std::lower_bound(angles.begin(), angles.end(), a);
    double best = kTwoPi;
    if (it != angles.end()) best = std::min(best, circle_distance(a, *it));
    if (it != angles.begin()) best = std::min(best, circle_distance(a, *(it - 1)));
    best = std::min(best, circle_distance(a, angles.front()));
    best = std::min(best, circle_distance(a, angles.back()));
    return best;
}

}  // namespace detail

/// Checks how close the direction set is to being invariant under rotation
/// by theta (forward) and -theta (backward).
inline InvarianceReport invariance_check(const DirectionSet& d, double theta,
                                         double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("invariance_check: tol must be positive");
    InvarianceReport rep;
    if (d.angles.empty()) return rep;
    double fwd = 0.0, bwd = 0.0;
    for (double a : d.angles) {
        fwd = std::max(fwd, detail::nearest_angle_distance(d.angles, a + theta));
        bwd = std::max(bwd, detail::nearest_angle_distance(d.angles, a - theta));
    }
    rep.forward_ok = fwd <= tol;
    rep.backward_ok = bwd <= tol;
    rep.worst_defect = std::max(fwd, bwd);
    return rep;
}

/// Best rational approximation theta ~ 2*pi*m/n with n <= max_den, if one
/// matches within tol (radians). Continued-fraction convergents of
/// theta / (2*pi).
inline std::optional<std::pair<long, long>> rational_angle(double theta,
                                                           long max_den = 64,
                                                           double tol = 1e-9) {
    const double x = normalize_angle(theta) / kTwoPi;  // in [0, 1)
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(frac);
        const long ai = static_cast<long>(a);
        const long p2 = ai * p1 + p0;
        const long q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q1 > 0 && std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) *
                              kTwoPi <= tol)
            return std::make_pair(p1, q1);
        const double rem = frac - a;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

enum class RotationVerdict {
    LineCase,                  // graph is a straight line: no constraint
    AdmissibleIdentity,
    AdmissiblePointReflection,
    Rejected,
    Inconclusive,              // no arc evidence on this sample
};

struct CandidateVerdict {
    double angle{0.0};
    RotationVerdict verdict{RotationVerdict::Inconclusive};
    std::string reason;
};

inline const char* to_string(RotationVerdict v) {
    switch (v) {
        case RotationVerdict::LineCase: return "line";
        case RotationVerdict::AdmissibleIdentity: return "admissible-identity";
        case RotationVerdict::AdmissiblePointReflection: return "admissible-point-reflection";
        case RotationVerdict::Rejected: return "rejected";
        default: return "inconclusive";
    }
}

/// Max vertical deviation of the sampled nodes from the chord through the
/// graph's endpoints.
inline double line_deviation(const SampledGraph& g) {
    const double slope = (g.ys.back() - g.ys.front()) / (g.xs.back() - g.xs.front());
    double worst = 0.0;
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        worst = std::max(worst,
                         std::fabs(g.ys[i] - (g.ys.front() + slope * (g.xs[i] - g.xs.front()))));
    return worst;
}

/// Necessary-condition screening of candidate rotation angles for self-maps
/// of the graph, on sampled data. Angles near 0 or pi are admissible; for
/// any other angle the screening seeks a contradiction from the sampled
/// direction set: a rational angle 2*pi*m/n with n >= 3 spreads a direction
/// arc over >= 3 components, and an irrational-like angle drives the arc
/// orbit onto the vertical directions. These are evidence checks on a finite
/// sample, not proofs.
inline std::vector<CandidateVerdict> admissible_rotations(
    const SampledGraph& g, const std::vector<double>& candidates,
    double tol = 1e-9) {
    g.validate();
    std::vector<CandidateVerdict> out;
    out.reserve(candidates.size());

    const double line_tol = std::max(1e-9, 4.0 * g.eval_error);
    if (line_deviation(g) <= line_tol) {
        for (double a : candidates)
            out.push_back({a, RotationVerdict::LineCase,
                           "graph is a straight line; no rotation constraint"});
        return out;
    }

    // Base point: fixed point of the canonical left self-map candidate
    // v |-> v/2 + (0, f(0)/2), i.e. the left endpoint of the graph.
    const Vec2 p_star{g.xs.front(), g.ys.front()};
    const DirectionSet dirs = phi_image(g, p_star);
    const double resolution = default_arc_resolution(dirs.angles.size());
    const ArcReport arc = contains_arc(dirs, resolution);

    for (double a : candidates) {
        CandidateVerdict cv;
        cv.angle = a;
        switch (classify_rotation(a, tol)) {
            case RotationKind::Identity:
                cv.verdict = RotationVerdict::AdmissibleIdentity;
                cv.reason = "angle within tol of 0 (mod 2*pi)";
                out.push_back(cv);
                continue;
            case RotationKind::PointReflection:
                cv.verdict = RotationVerdict::AdmissiblePointReflection;
                cv.reason = "angle within tol of pi (mod 2*pi)";
                out.push_back(cv);
                continue;
            default:
                break;
        }
        if (!arc.contains_arc) {
            cv.verdict = RotationVerdict::Inconclusive;
            cv.reason = "no arc detected in sampled direction image";
            out.push_back(cv);
            continue;
        }
        const auto [start, len] = *arc.witness_arc;
        if (auto mn = rational_angle(a)) {
            const long n = mn->second;
            if (n >= 3) {
                // The n rotated copies of the witness arc would force the
                // direction image into >= 3 connected components; count the
                // components of their union by a sweep over sorted arcs.
                std::vector<std::pair<double, double>> arcs;
                arcs.reserve(static_cast<std::size_t>(n));
                for (long i = 0; i < n; ++i) {
                    const double s = normalize_angle(start + static_cast<double>(i) * a);
                    arcs.emplace_back(s, s + len);
                }
                std::sort(arcs.begin(), arcs.end());
                long comps = 0;
                double reach = -1.0;
                for (const auto& [s, e] : arcs) {
                    if (s > reach) ++comps;
                    reach = std::max(reach, e);
                }
                // wrap merge: an arc reaching past 2*pi can join the first
                if (!arcs.empty() && reach >= kTwoPi + arcs.front().first && comps > 1)
                    --comps;
                if (comps >= 3) {
                    cv.verdict = RotationVerdict::Rejected;
                    cv.reason = "rational angle 2*pi*" + std::to_string(mn->first) + "/" +
                                std::to_string(n) + ": direction image would need " +
                                std::to_string(comps) + " components (> 2)";
                    out.push_back(cv);
                    continue;
                }
            }
        }
        // Irrational-like (or merged-rational) branch: rotate the witness arc
        // until it lands on a vertical direction.
        bool hit = false;
        std::size_t hit_step = 0;
        const std::size_t max_steps = 10000;
        for (std::size_t i = 1; i <= max_steps; ++i) {
            const double sa = normalize_angle(start + static_cast<double>(i) * a);
            const double rel_n = normalize_angle(kNorthAngle - sa);
            const double rel_s = normalize_angle(kSouthAngle - sa);
            if (rel_n <= len || rel_s <= len) {
                hit = true;
                hit_step = i;
                break;
            }
        }
        if (hit) {
            cv.verdict = RotationVerdict::Rejected;
            cv.reason = "orbit of the direction arc reaches a vertical direction after " +
                        std::to_string(hit_step) + " rotations";
        } else {
            cv.verdict = RotationVerdict::Inconclusive;
            cv.reason = "orbit did not reach a vertical direction within 10000 rotations";
        }
        out.push_back(cv);
    }
    return out;
}

}  // namespace grigid
