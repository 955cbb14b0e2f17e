#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grigid/geometry.hpp"
#include "grigid/graph.hpp"
#include "grigid/similitude.hpp"

namespace grigid {

/// Signed affine action x |-> scale * x + offset: the x-component of an
/// axis-aligned similitude (rotation 0 gives scale = +r, rotation pi gives
/// scale = -r). Composing actions composes the underlying maps, so interval
/// endpoints come out of exact ratio/offset arithmetic rather than samples.
struct AxisAction {
    double scale{1.0};
    double offset{0.0};

    Interval map(const Interval& iv) const {
        const double p = scale * iv.lo + offset;
        const double q = scale * iv.hi + offset;
        return p <= q ? Interval(p, q) : Interval(q, p);
    }
};

/// outer after inner.
inline AxisAction compose(const AxisAction& outer, const AxisAction& inner) {
    return {outer.scale * inner.scale, outer.scale * inner.offset + outer.offset};
}

/// x-action of an axis-aligned similitude; throws for any other rotation.
inline AxisAction axis_action(const Similitude& s, double rot_tol = 1e-9) {
    switch (classify_rotation(s.angle, rot_tol)) {
        case RotationKind::Identity:
            return {s.ratio, s.translation.x};
        case RotationKind::PointReflection:
            return {-s.ratio, s.translation.x};
        default:
            throw std::invalid_argument(
                "axis_action: rotation is neither identity nor point reflection; "
                "rectangle images are not axis-aligned");
    }
}

/// Least n >= 1 with r_max^n <= delta.
inline int depth_for_width(const Ifs& ifs, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("depth_for_width: delta must lie in (0,1]");
    int n = 1;
    double w = ifs.r_max();
    while (w > delta) {
        w *= ifs.r_max();
        if (++n > 1 << 20)
            throw std::runtime_error("depth_for_width: depth overflow before reaching delta");
    }
    return n;
}

struct WordInterval {
    Word word;
    Interval interval;
    double ratio{1.0};
};

/// All k^n0 projected intervals I_w = pi(S_w(R)) at depth n0, via exact
/// word arithmetic on the x-actions. Verifies that the family covers [0,1]
/// (the numerical face of graph self-similarity); a gap means the IFS does
/// not tile the graph and is reported with the first uncovered point.
inline std::vector<WordInterval> generate_intervals(const Ifs& ifs, const Rectangle& frame,
                                                    int n0, double rot_tol = 1e-9,
                                                    bool verify_cover = true) {
    if (n0 < 1) throw std::invalid_argument("generate_intervals: depth must be >= 1");
    const int k = ifs.size();
    double count = std::pow(static_cast<double>(k), n0);
    if (count > static_cast<double>(1 << 22))
        throw std::invalid_argument("generate_intervals: k^n0 too large (" +
                                    std::to_string(count) + " words)");

    std::vector<AxisAction> letter(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i)
        letter[static_cast<std::size_t>(i - 1)] = axis_action(ifs.map(i), rot_tol);

    std::vector<WordInterval> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> odo(static_cast<std::size_t>(n0), 1);
    while (true) {
        Interval iv = frame.x;
        double ratio = 1.0;
        // letters applied first-to-last: iv passes through each letter action
        for (int pos = 0; pos < n0; ++pos) {
            const AxisAction& a = letter[static_cast<std::size_t>(odo[static_cast<std::size_t>(pos)] - 1)];
            iv = a.map(iv);
            ratio *= std::fabs(a.scale);
        }
        out.push_back({Word{odo}, iv, ratio});
        int pos = n0 - 1;
        while (pos >= 0 && odo[static_cast<std::size_t>(pos)] == k) {
            odo[static_cast<std::size_t>(pos)] = 1;
            --pos;
        }
        if (pos < 0) break;
        ++odo[static_cast<std::size_t>(pos)];
    }

    if (verify_cover) {
        std::vector<const WordInterval*> sorted;
        sorted.reserve(out.size());
        for (const auto& wi : out) sorted.push_back(&wi);
        std::sort(sorted.begin(), sorted.end(),
                  [](const WordInterval* a, const WordInterval* b) {
                      return a->interval.lo < b->interval.lo;
                  });
        const double tol = 1e-12;
        double frontier = 0.0;
        for (const WordInterval* wi : sorted) {
            if (wi->interval.lo > frontier + tol) break;
            frontier = std::max(frontier, wi->interval.hi);
            if (frontier >= 1.0) break;
        }
        if (frontier < 1.0 - tol)
            throw std::runtime_error(
                "generate_intervals: family does not cover [0,1]; first uncovered point x=" +
                detail::format17(std::nextafter(frontier, 2.0)) +
                " (IFS is not self-similar for this graph)");
    }
    return out;
}

/// Greedy minimal subcover of `target`, as indices into `intervals`, ordered
/// by left endpoint. Greedy maximal-extension picks, then a right-to-left
/// prune pass; afterwards removing any single member breaks coverage, which
/// forces members two apart to be disjoint.
inline std::vector<std::size_t> minimal_subcover(const std::vector<Interval>& intervals,
                                                 const Interval& target) {
    auto covers = [&](const std::vector<std::size_t>& chosen) {
        double frontier = target.lo;
        bool started = false;
        for (std::size_t idx : chosen) {
            const Interval& iv = intervals[idx];
            if (iv.lo > frontier) return false;
            if (iv.hi >= frontier) {
                frontier = std::max(frontier, iv.hi);
                started = true;
            }
            if (frontier >= target.hi && started) return true;
        }
        return started && frontier >= target.hi;
    };

    std::vector<std::size_t> chosen;
    double frontier = target.lo;
    while (true) {
        std::size_t best = intervals.size();
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            const Interval& iv = intervals[i];
            if (iv.lo <= frontier && iv.hi >= frontier) {
                if (best == intervals.size() || iv.hi > intervals[best].hi) best = i;
            }
        }
        if (best == intervals.size())
            throw std::runtime_error("minimal_subcover: no interval covers x=" +
                                     detail::format17(frontier));
        chosen.push_back(best);
        const double reach = intervals[best].hi;
        if (reach >= target.hi) break;
        if (reach <= frontier)
            throw std::runtime_error("minimal_subcover: no interval extends past x=" +
                                     detail::format17(frontier));
        frontier = reach;
    }
    // prune pass, right to left
    for (std::size_t j = chosen.size(); j-- > 0;) {
        std::vector<std::size_t> trimmed;
        trimmed.reserve(chosen.size() - 1);
        for (std::size_t i = 0; i < chosen.size(); ++i)
            if (i != j) trimmed.push_back(chosen[i]);
        if (!trimmed.empty() && covers(trimmed)) chosen = std::move(trimmed);
    }
    return chosen;
}

/// Per-delta certificate block: the cover family, the minimal subcover of
/// the worst checked pair, and the observed difference-quotient extremes.
struct CoverCertificate {
    double delta{0.0};
    int n0{0};
    std::vector<std::pair<Word, Interval>> lambda_set;  // subcover of the worst pair
    double total_length{0.0};
    double bound_4delta{0.0};
    double omega_f{0.0};
    double lipschitz_constant{0.0};
    std::size_t checked_pairs{0};
    double worst_ratio{0.0};
    std::pair<double, double> worst_pair{0.0, 0.0};
    double ratio_slack{0.0};
    double scaling_defect{0.0};  // worst |osc(I_w) - r_w * omega_f| over the family
    double scaling_slack{0.0};
    bool passed{false};
    std::string failure;
};

/// Aggregate over all requested deltas.
struct LipschitzCertificate {
    double omega_f{0.0};
    double omega_slack{0.0};
    double lipschitz_constant{0.0};
    std::vector<CoverCertificate> blocks;
    std::size_t checked_pairs{0};
    double worst_ratio{0.0};
    bool passed{false};
    std::string failure;
};

/// Certifies the 4*omega Lipschitz bound: for each delta, builds the
/// depth-n0 interval family, spot-checks the oscillation scaling
/// osc(I_w) = r_w * omega across the family, and sweeps grid pairs at
/// distance ~delta against the chained-cover bound. Any violation marks the
/// certificate FAILED with a witness; nothing is thrown for bound failures.
inline LipschitzCertificate certify_lipschitz(const Ifs& ifs, const SampledGraph& g,
                                              const std::vector<double>& deltas,
                                              std::size_t pair_budget = 4096) {
    g.validate();
    if (deltas.empty()) throw std::invalid_argument("certify_lipschitz: no deltas");
    LipschitzCertificate cert;
    const Interval domain(0.0, 1.0);
    const Rectangle frame = framing_rectangle(g, domain);
    const double omega = oscillation(g, domain);
    const double modulus = g.step_modulus();
    const double h = g.spacing();
    cert.omega_f = omega;
    cert.omega_slack = 2.0 * g.eval_error;
    cert.lipschitz_constant = 4.0 * omega;
    cert.passed = true;

    for (double delta : deltas) {
        CoverCertificate blk;
        blk.delta = delta;
        blk.omega_f = omega;
        blk.lipschitz_constant = 4.0 * omega;
        blk.bound_4delta = 4.0 * delta;
        blk.ratio_slack = (8.0 * g.eval_error + 4.0 * modulus) / delta;
        blk.scaling_slack = 4.0 * g.eval_error + 4.0 * modulus;
        blk.passed = true;

        std::vector<WordInterval> family;
        try {
            blk.n0 = depth_for_width(ifs, delta);
            family = generate_intervals(ifs, frame, blk.n0);
        } catch (const std::exception& e) {
            blk.passed = false;
            blk.failure = e.what();
            cert.blocks.push_back(std::move(blk));
            cert.passed = false;
            if (cert.failure.empty()) cert.failure = cert.blocks.back().failure;
            continue;
        }

        // oscillation scaling across the family (graph self-similarity probe)
        for (const WordInterval& wi : family) {
            Interval clipped(std::max(0.0, wi.interval.lo), std::min(1.0, wi.interval.hi));
            if (clipped.lo > clipped.hi) continue;
            const double defect = std::fabs(oscillation(g, clipped) - wi.ratio * omega);
            if (defect > blk.scaling_defect) blk.scaling_defect = defect;
            if (defect > blk.scaling_slack && blk.passed) {
                blk.passed = false;
                blk.failure = "oscillation scaling violated on word " +
                              to_string(wi.word) + ": |osc - r_w*omega| = " +
                              detail::format17(defect);
            }
        }

        // pair sweep at |x - y| = round(delta/h) * h
        const std::size_t n = g.nodes() - 1;
        const auto m = static_cast<std::size_t>(std::llround(delta / h));
        if (m < 1 || m > n)
            throw std::invalid_argument("certify_lipschitz: delta " +
                                        detail::format17(delta) +
                                        " not resolvable on this grid");
        std::vector<Interval> bare;
        bare.reserve(family.size());
        for (const auto& wi : family) bare.push_back(wi.interval);

        const std::size_t pair_count = n - m + 1;
        const std::size_t stride = std::max<std::size_t>(1, pair_count / std::max<std::size_t>(1, pair_budget));
        for (std::size_t i = 0; i < pair_count; i += stride) {
            const double x = g.xs[i], y = g.xs[i + m];
            const double dq = std::fabs(g.ys[i + m] - g.ys[i]) / (y - x);
            ++blk.checked_pairs;
            const bool worst = dq > blk.worst_ratio || blk.checked_pairs == 1;
            if (worst) {
                blk.worst_ratio = dq;
                blk.worst_pair = {x, y};
            }
            if (dq > blk.lipschitz_constant + blk.ratio_slack && blk.passed) {
                blk.passed = false;
                blk.failure = "difference quotient " + detail::format17(dq) +
                              " at pair (" + detail::format17(x) + ", " +
                              detail::format17(y) + ") exceeds 4*omega + slack";
            }

            // cover bounds for this pair
            std::vector<std::size_t> lambda;
            try {
                lambda = minimal_subcover(bare, Interval(x, y));
            } catch (const std::exception& e) {
                if (blk.passed) {
                    blk.passed = false;
                    blk.failure = e.what();
                }
                continue;
            }
            double total = 0.0, odd_sum = 0.0, even_sum = 0.0, chained = 0.0;
            for (std::size_t j = 0; j < lambda.size(); ++j) {
                const Interval& iv = bare[lambda[j]];
                total += iv.length();
                Interval clipped(std::max(0.0, iv.lo), std::min(1.0, iv.hi));
                chained += oscillation(g, clipped);
                if (j > 0 && j + 1 < lambda.size()) {
                    if (j % 2 == 1) odd_sum += iv.length();
                    else even_sum += iv.length();
                }
                if (j + 2 < lambda.size() &&
                    !(iv.hi < bare[lambda[j + 2]].lo) && blk.passed) {
                    blk.passed = false;
                    blk.failure = "subcover members two apart intersect near x=" +
                                  detail::format17(iv.hi);
                }
            }
            const double tol = 1e-9 * std::max(1.0, delta);
            const double chain_slack =
                static_cast<double>(lambda.size()) * (2.0 * g.eval_error + 2.0 * modulus) + 1e-12;
            if (blk.passed && total > 4.0 * delta + tol) {
                blk.passed = false;
                blk.failure = "subcover total length " + detail::format17(total) +
                              " exceeds 4*delta";
            }
            if (blk.passed && (odd_sum > delta + tol || even_sum > delta + tol)) {
                blk.passed = false;
                blk.failure = "interior odd/even subcover length sum exceeds delta";
            }
            if (blk.passed && std::fabs(g.ys[i + m] - g.ys[i]) > chained + chain_slack) {
                blk.passed = false;
                blk.failure = "chained oscillation bound violated at pair (" +
                              detail::format17(x) + ", " + detail::format17(y) + ")";
            }
            if (worst) {
                blk.lambda_set.clear();
                for (std::size_t idx : lambda)
                    blk.lambda_set.emplace_back(family[idx].word, family[idx].interval);
                blk.total_length = total;
            }
        }

        cert.checked_pairs += blk.checked_pairs;
        cert.worst_ratio = std::max(cert.worst_ratio, blk.worst_ratio);
        if (!blk.passed) {
            cert.passed = false;
            if (cert.failure.empty()) cert.failure = blk.failure;
        }
        cert.blocks.push_back(std::move(blk));
    }
    return cert;
}

}  // namespace grigid
