#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grigid/cover.hpp"
#include "grigid/geometry.hpp"
#include "grigid/graph.hpp"
#include "grigid/similitude.hpp"

namespace grigid {

/// Checks that an axis-aligned similitude maps a chord of the graph onto a
/// chord of equal slope. The image pair may arrive in either order (a point
/// reflection reverses it).
inline bool slope_invariance_check(const Similitude& s,
                                   std::pair<Vec2, Vec2> chord,
                                   std::pair<Vec2, Vec2> image_chord,
                                   double tol, double rot_tol = 1e-9) {
    if (classify_rotation(s.angle, rot_tol) == RotationKind::Other)
        throw std::invalid_argument(
            "slope_invariance_check: rotation is neither identity nor point reflection");
    const Vec2 p = apply(s, chord.first);
    const Vec2 q = apply(s, chord.second);
    const bool direct = distance(p, image_chord.first) <= tol &&
                        distance(q, image_chord.second) <= tol;
    const bool swapped = distance(p, image_chord.second) <= tol &&
                         distance(q, image_chord.first) <= tol;
    if (!direct && !swapped)
        throw std::invalid_argument(
            "slope_invariance_check: image chord does not match the mapped chord");
    const double dx0 = chord.second.x - chord.first.x;
    const double dx1 = image_chord.second.x - image_chord.first.x;
    if (dx0 == 0.0 || dx1 == 0.0)
        throw std::domain_error("slope_invariance_check: vertical chord has no slope");
    const double s0 = (chord.second.y - chord.first.y) / dx0;
    const double s1 = (image_chord.second.y - image_chord.first.y) / dx1;
    return std::fabs(s0 - s1) <= tol;
}

/// Subinterval witness [s,t] = I_w for a word w: contains the target's
/// midpoint, has length between c*(b-a) and (b-a)/2, and carries the slope
/// measured on the sampled graph.
struct SlopeWitness {
    Interval interval;
    Word word;
    int depth{0};
    double slope{0.0};
};

/// Breadth-first search over midpoint-containing words, one depth at a time.
/// Depth d+1 candidates extend depth-d candidates by one inner letter, which
/// is sound because word intervals nest along inner extensions. Stops at the
/// first depth where a containing interval has length <= (b-a)/2, breaking
/// ties toward the lexicographically smallest word.
inline SlopeWitness find_slope_subinterval(const Ifs& ifs, const SampledGraph& g,
                                           const Interval& target,
                                           double rot_tol = 1e-9) {
    if (!(target.length() > 0.0))
        throw std::invalid_argument("find_slope_subinterval: target must have positive length");
    const int k = ifs.size();
    std::vector<AxisAction> letter(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i)
        letter[static_cast<std::size_t>(i - 1)] = axis_action(ifs.map(i), rot_tol);

    const Interval base(0.0, 1.0);
    const double mid = target.midpoint();
    const double half = 0.5 * target.length();

    struct Node {
        std::vector<int> word;  // letters in application order (first = innermost)
        AxisAction action;      // composed action of the whole word
    };
    std::vector<Node> layer;
    for (int j = 1; j <= k; ++j) {
        const AxisAction& a = letter[static_cast<std::size_t>(j - 1)];
        if (a.map(base).contains(mid)) layer.push_back({{j}, a});
    }
    const int max_depth = 4096;
    for (int depth = 1; depth <= max_depth; ++depth) {
        if (layer.empty())
            throw std::runtime_error(
                "find_slope_subinterval: no word interval contains the midpoint at depth " +
                std::to_string(depth) + " (IFS does not cover the target)");
        const Node* best = nullptr;
        Interval best_iv;
        for (const Node& nd : layer) {
            const Interval iv = nd.action.map(base);
            if (iv.length() <= half) {
                if (!best || nd.word < best->word) {
                    best = &nd;
                    best_iv = iv;
                }
            }
        }
        if (best) {
            SlopeWitness w;
            w.interval = best_iv;
            w.word = Word{best->word};
            w.depth = depth;
            const double fs = g.value_at(std::max(0.0, best_iv.lo));
            const double ft = g.value_at(std::min(1.0, best_iv.hi));
            w.slope = (ft - fs) / best_iv.length();
            return w;
        }
        std::vector<Node> next;
        next.reserve(layer.size() * static_cast<std::size_t>(k));
        if (layer.size() > 65536)
            throw std::runtime_error(
                "find_slope_subinterval: midpoint cone is too wide (heavily "
                "overlapping maps)");
        for (const Node& nd : layer) {
            for (int j = 1; j <= k; ++j) {
                // new innermost letter j: S_w after S_j
                const AxisAction& a = letter[static_cast<std::size_t>(j - 1)];
                const AxisAction child = compose(nd.action, a);
                if (!child.map(base).contains(mid)) continue;
                Node c;
                c.word.reserve(nd.word.size() + 1);
                c.word.push_back(j);
                c.word.insert(c.word.end(), nd.word.begin(), nd.word.end());
                c.action = child;
                next.push_back(std::move(c));
            }
        }
        layer = std::move(next);
    }
    throw std::runtime_error("find_slope_subinterval: depth limit exceeded");
}

struct GapRecord {
    Interval gap;
    double slope{0.0};
    bool degenerate{false};  // zero-length parent; no slope measured
};

/// Stage n of the nested construction: 2^n ordered intervals; removed lists
/// the gaps taken out by the refinement that produced this stage.
struct CantorStage {
    int stage{0};
    std::vector<Interval> intervals;
    std::vector<GapRecord> removed;
    double total_length{0.0};
};

inline CantorStage cantor_stage_zero(const Interval& target) {
    CantorStage s;
    s.stage = 0;
    s.intervals = {target};
    s.total_length = target.length();
    return s;
}

/// One refinement: removes a slope witness's open interior from each
/// interval. Zero-length intervals (a witness that touched an endpoint
/// earlier) split into two zero-length children with an empty gap, keeping
/// the 2^n count and the exact partition identity.
inline CantorStage cantor_refine(const Ifs& ifs, const SampledGraph& g,
                                 const CantorStage& stage) {
    CantorStage out;
    out.stage = stage.stage + 1;
    out.intervals.reserve(stage.intervals.size() * 2);
    out.removed.reserve(stage.intervals.size());
    for (const Interval& iv : stage.intervals) {
        if (iv.length() <= 0.0) {
            out.intervals.push_back(iv);
            out.intervals.push_back(iv);
            out.removed.push_back({Interval(iv.lo, iv.lo), 0.0, true});
            continue;
        }
        const SlopeWitness w = find_slope_subinterval(ifs, g, iv);
        const double s = std::max(iv.lo, w.interval.lo);
        const double t = std::min(iv.hi, w.interval.hi);
        out.intervals.emplace_back(iv.lo, s);
        out.intervals.emplace_back(t, iv.hi);
        out.removed.push_back({Interval(s, t), w.slope, false});
    }
    for (const Interval& iv : out.intervals) out.total_length += iv.length();
    return out;
}

/// Constructor from the converse direction: the two-map system
/// v |-> v/2 + (0, f(0)/2) and v |-> v/2 + (1/2, f(1)/2) fixes the graph of
/// f(x) = a x + b on [0,1].
inline Ifs converse_ifs(double a, double b) {
    const double f0 = b;
    const double f1 = a + b;
    return Ifs({Similitude(0.5, 0.0, {0.0, 0.5 * f0}),
                Similitude(0.5, 0.0, {0.5, 0.5 * f1})});
}

struct StageCheck {
    int stage{0};
    std::size_t interval_count{0};
    double total_length{0.0};
    double length_bound{0.0};      // (1-c)^n * (b-a)
    double partition_defect{0.0};  // |intervals + all gaps - (b-a)|
    double worst_slope_defect{0.0};
    double deviation_bound{0.0};   // (L+|lambda|) * length_bound + slack
    bool ok{true};
    std::string failure;
};

struct AffineCertificate {
    Interval target;
    double lambda{0.0};
    double lipschitz_constant{0.0};
    double c{0.0};
    int stages{0};
    double measured_deviation{0.0};
    double bound{0.0};  // final-stage (L+|lambda|)(1-c)^n (b-a)
    double slope_slack_scale{0.0};
    std::vector<StageCheck> checks;
    std::vector<CantorStage> stage_sets;
    bool affine_consistent{false};
    std::string failure;
};

/// Runs the nested-interval construction for `stages` rounds and checks, per
/// stage: the 2^n interval count, the exact partition identity, the
/// geometric total-length bound, slope agreement of every removed gap with
/// lambda = f(1) - f(0), and the final deviation estimate
/// |f(b)-f(a) - lambda(b-a)| <= (L+|lambda|)(1-c)^n(b-a) + declared slack.
/// Any violation yields verdict NOT-SELF-SIMILAR with the failing stage.
inline AffineCertificate certify_affine(const Ifs& ifs, const SampledGraph& g,
                                        const Interval& target, int stages,
                                        double lipschitz_constant) {
    g.validate();
    if (stages < 1) throw std::invalid_argument("certify_affine: stages must be >= 1");
    if (!(target.length() > 0.0) || target.lo < 0.0 || target.hi > 1.0)
        throw std::invalid_argument("certify_affine: target must be a positive subinterval of [0,1]");

    AffineCertificate cert;
    cert.target = target;
    cert.lambda = g.value_at(1.0) - g.value_at(0.0);
    cert.lipschitz_constant = lipschitz_constant;
    cert.c = ifs.half_min_ratio();
    cert.stages = stages;

    const double modulus = g.step_modulus();
    const double meas_slack = 2.0 * g.eval_error + 2.0 * modulus + 1e-12;
    const double fa = g.value_at(target.lo);
    const double fb = g.value_at(target.hi);
    cert.measured_deviation = std::fabs(fb - fa - cert.lambda * target.length());
    cert.slope_slack_scale = 2.0 * (g.eval_error + modulus);

    CantorStage cur = cantor_stage_zero(target);
    double gaps_total = 0.0;
    double gap_defect_sum = 0.0;  // sum over gaps of |measured rise - lambda*len|
    cert.affine_consistent = true;

    for (int n = 1; n <= stages; ++n) {
        cur = cantor_refine(ifs, g, cur);
        StageCheck chk;
        chk.stage = n;
        chk.interval_count = cur.intervals.size();
        chk.total_length = cur.total_length;
        chk.length_bound = std::pow(1.0 - cert.c, n) * target.length();

        if (chk.interval_count != (std::size_t{1} << n)) {
            chk.ok = false;
            chk.failure = "interval count != 2^n";
        }
        for (const GapRecord& gr : cur.removed) {
            gaps_total += gr.gap.length();
            if (gr.degenerate) continue;
            const double rise = g.value_at(gr.gap.hi) - g.value_at(gr.gap.lo);
            gap_defect_sum += std::fabs(rise - cert.lambda * gr.gap.length());
            const double tol = cert.slope_slack_scale / gr.gap.length() + 1e-9;
            const double defect = std::fabs(gr.slope - cert.lambda);
            chk.worst_slope_defect = std::max(chk.worst_slope_defect, defect);
            if (defect > tol && chk.ok) {
                chk.ok = false;
                chk.failure = "gap [" + detail::format17(gr.gap.lo) + ", " +
                              detail::format17(gr.gap.hi) + "] slope " +
                              detail::format17(gr.slope) + " deviates from lambda by " +
                              detail::format17(defect) + " (tol " + detail::format17(tol) + ")";
            }
        }
        chk.partition_defect =
            std::fabs(cur.total_length + gaps_total - target.length());
        if (chk.partition_defect > 1e-12 && chk.ok) {
            chk.ok = false;
            chk.failure = "partition identity defect " + detail::format17(chk.partition_defect);
        }
        if (cur.total_length > chk.length_bound * (1.0 + 1e-12) && chk.ok) {
            chk.ok = false;
            chk.failure = "|C_n| = " + detail::format17(cur.total_length) +
                          " exceeds (1-c)^n (b-a) = " + detail::format17(chk.length_bound);
        }
        chk.deviation_bound = (lipschitz_constant + std::fabs(cert.lambda)) * chk.length_bound +
                              gap_defect_sum + meas_slack;
        if (cert.measured_deviation > chk.deviation_bound && chk.ok) {
            chk.ok = false;
            chk.failure = "measured deviation " + detail::format17(cert.measured_deviation) +
                          " exceeds stage bound " + detail::format17(chk.deviation_bound);
        }
        if (!chk.ok) {
            cert.affine_consistent = false;
            if (cert.failure.empty())
                cert.failure = "stage " + std::to_string(n) + ": " + chk.failure;
        }
        cert.checks.push_back(chk);
        cert.stage_sets.push_back(cur);
    }
    cert.bound = (lipschitz_constant + std::fabs(cert.lambda)) *
                 std::pow(1.0 - cert.c, stages) * target.length();
    return cert;
}

/// Convenience overload: derives L = 4*omega from a fresh Lipschitz
/// certificate and fails fast if that certificate did not pass.
inline AffineCertificate certify_affine(const Ifs& ifs, const SampledGraph& g,
                                        const Interval& target, int stages) {
    const std::vector<double> deltas{0.25, 0.125, 0.0625};
    const LipschitzCertificate lip = certify_lipschitz(ifs, g, deltas, 512);
    AffineCertificate cert = certify_affine(ifs, g, target, stages, lip.lipschitz_constant);
    if (!lip.passed) {
        cert.affine_consistent = false;
        if (cert.failure.empty())
            cert.failure = "lipschitz certificate failed: " + lip.failure;
    }
    return cert;
}

}  // namespace grigid
