#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "grigid/geometry.hpp"
#include "grigid/point_set.hpp"

namespace grigid {

// ---------------------------------------------------------------------------
// Function catalog
// ---------------------------------------------------------------------------

struct AffineSpec {
    double slope{0.0};
    double intercept{0.0};
};

/// Tent series sum_{n=0}^{depth} 2^-n * dist(2^n x, Z); truncation tail is
/// bounded by 2^-(depth+1).
struct TakagiSpec {
    int depth{50};
};

/// sum_{n=0}^{depth} a^n cos(b^n pi x); tail bounded by a^(depth+1)/(1-a).
struct WeierstrassSpec {
    double a{0.5};
    int b{3};
    int depth{40};
};

/// Cantor-Lebesgue (devil's staircase) by base-3 digit scan of `depth`
/// digits; exact where the scan terminates, else off by at most 2^-depth.
struct CantorLebesgueSpec {
    int depth{40};
};

/// User-supplied samples on [0,1], resampled by linear interpolation.
struct CustomSpec {
    std::vector<Vec2> samples;  // strictly increasing x, x in [0,1]
    double eval_error{0.0};
    std::string name{"custom"};
};

using FunctionSpec =
    std::variant<AffineSpec, TakagiSpec, WeierstrassSpec, CantorLebesgueSpec, CustomSpec>;

inline double tent(double x) {
    const double f = x - std::floor(x);
    return f < 0.5 ? f : 1.0 - f;
}

inline double takagi_value(double x, int depth) {
    double sum = 0.0, w = 1.0, arg = x;
    for (int n = 0; n <= depth; ++n) {
        sum += w * tent(arg);
        w *= 0.5;
        arg *= 2.0;
    }
    return sum;
}

inline double weierstrass_value(double x, double a, int b, int depth) {
    double sum = 0.0, w = 1.0, freq = kPi;
    for (int n = 0; n <= depth; ++n) {
        sum += w * std::cos(freq * x);
        w *= a;
        freq *= static_cast<double>(b);
    }
    return sum;
}

inline double cantor_lebesgue_value(double x, int depth) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double y = 0.0, p = 0.5;
    for (int i = 0; i < depth; ++i) {
        x *= 3.0;
        int d = static_cast<int>(std::floor(x));
        if (d > 2) d = 2;
        x -= d;
        if (d == 1) return y + p;  // constant on the removed middle interval
        if (d == 2) y += p;
        p *= 0.5;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Sampled graphs
// ---------------------------------------------------------------------------

/// Graph of a function on a uniform grid over [0,1]. `eval_error` is a
/// uniform bound on |ys[i] - f(xs[i])|.
struct SampledGraph {
    std::vector<double> xs;
    std::vector<double> ys;
    double eval_error{0.0};
    std::string name;
    std::string params;  // key=value lines for the metadata sidecar

    std::size_t nodes() const { return xs.size(); }
    double spacing() const { return xs.size() > 1 ? xs[1] - xs[0] : 1.0; }

    void validate() const {
        if (xs.size() < 2 || xs.size() != ys.size())
            throw std::invalid_argument("SampledGraph: need matching xs/ys with >= 2 nodes");
        if (xs.front() != 0.0 || xs.back() != 1.0)
            throw std::invalid_argument("SampledGraph: grid must span [0,1]");
        if (!(eval_error >= 0.0))
            throw std::invalid_argument("SampledGraph: eval_error must be >= 0");
    }

    /// Linear interpolation; exact at grid nodes.
    double value_at(double x) const {
        if (x < 0.0 || x > 1.0)
            throw std::domain_error("SampledGraph: x outside [0,1]");
        const std::size_t n = xs.size() - 1;
        std::size_t i = static_cast<std::size_t>(x * static_cast<double>(n));
        if (i >= n) i = n - 1;
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        if (t <= 0.0) return ys[i];
        if (t >= 1.0) return ys[i + 1];
        return ys[i] + t * (ys[i + 1] - ys[i]);
    }

    /// Largest one-step |dy|; the observed modulus of continuity at scale h.
    double step_modulus() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < ys.size(); ++i)
            m = std::max(m, std::fabs(ys[i + 1] - ys[i]));
        return m;
    }

    PointSet point_set() const {
        std::vector<Vec2> pts;
        pts.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
        return PointSet(std::move(pts));
    }
};

namespace detail {

inline double custom_value(const CustomSpec& c, double x) {
    const auto& s = c.samples;
    auto it = std::lower_bound(s.begin(), s.end(), x,
                               [](Vec2 p, double v) { return p.x < v; });
    if (it == s.begin()) return it->y;
    if (it == s.end()) return (it - 1)->y;
    const Vec2 a = *(it - 1), b = *it;
    if (b.x == a.x) return a.y;
    return a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
}

}  // namespace detail

/// Samples a catalog function on the uniform (n+1)-node grid over [0,1] and
/// records the truncation bound as eval_error.
inline SampledGraph sample(const FunctionSpec& spec, std::size_t n) {
    if (n < 2) throw std::invalid_argument("sample: need n >= 2 grid cells");
    SampledGraph g;
    g.xs.resize(n + 1);
    g.ys.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g.xs[i] = static_cast<double>(i) / static_cast<double>(n);

    if (const auto* a = std::get_if<AffineSpec>(&spec)) {
        for (std::size_t i = 0; i <= n; ++i) g.ys[i] = a->slope * g.xs[i] + a->intercept;
        g.eval_error = 0.0;
        g.name = "affine(" + std::to_string(a->slope) + "," + std::to_string(a->intercept) + ")";
        g.params = "slope=" + detail::format17(a->slope) + "\nintercept=" +
                   detail::format17(a->intercept) + '\n';
    } else if (const auto* t = std::get_if<TakagiSpec>(&spec)) {
        if (t->depth < 1) throw std::invalid_argument("sample: takagi depth must be >= 1");
        for (std::size_t i = 0; i <= n; ++i) g.ys[i] = takagi_value(g.xs[i], t->depth);
        g.eval_error = std::ldexp(1.0, -(t->depth + 1));
        g.name = "takagi";
        g.params = "depth=" + std::to_string(t->depth) + '\n';
    } else if (const auto* w = std::get_if<WeierstrassSpec>(&spec)) {
        if (!(w->a > 0.0 && w->a < 1.0))
            throw std::invalid_argument("sample: weierstrass a must lie in (0,1)");
        if (w->b < 1 || w->b % 2 == 0)
            throw std::invalid_argument("sample: weierstrass b must be an odd natural");
        if (w->depth < 1) throw std::invalid_argument("sample: weierstrass depth must be >= 1");
        for (std::size_t i = 0; i <= n; ++i)
            g.ys[i] = weierstrass_value(g.xs[i], w->a, w->b, w->depth);
        g.eval_error = std::pow(w->a, w->depth + 1) / (1.0 - w->a);
        g.name = "weierstrass";
        g.params = "a=" + detail::format17(w->a) + "\nb=" + std::to_string(w->b) +
                   "\ndepth=" + std::to_string(w->depth) + '\n';
    } else if (const auto* c = std::get_if<CantorLebesgueSpec>(&spec)) {
        if (c->depth < 1) throw std::invalid_argument("sample: cantor depth must be >= 1");
        for (std::size_t i = 0; i <= n; ++i)
            g.ys[i] = cantor_lebesgue_value(g.xs[i], c->depth);
        g.eval_error = std::ldexp(1.0, -c->depth);
        g.name = "cantor-lebesgue";
        g.params = "depth=" + std::to_string(c->depth) + '\n';
    } else if (const auto* cu = std::get_if<CustomSpec>(&spec)) {
        if (cu->samples.size() < 2)
            throw std::invalid_argument("sample: custom spec needs >= 2 samples");
        double modulus = 0.0;
        for (std::size_t i = 0; i + 1 < cu->samples.size(); ++i)
            modulus = std::max(modulus,
                               std::fabs(cu->samples[i + 1].y - cu->samples[i].y));
        for (std::size_t i = 0; i <= n; ++i) g.ys[i] = detail::custom_value(*cu, g.xs[i]);
        g.eval_error = cu->eval_error + modulus;
        g.name = cu->name;
        g.params = "source_samples=" + std::to_string(cu->samples.size()) + '\n';
    }
    g.validate();
    return g;
}

/// Oscillation of the sampled function over I: max - min across grid nodes
/// inside I plus interpolated endpoint values. I must lie within [0,1].
inline double oscillation(const SampledGraph& g, const Interval& I) {
    if (I.lo < 0.0 || I.hi > 1.0)
        throw std::domain_error("oscillation: interval outside [0,1]");
    double lo = g.value_at(I.lo), hi = lo;
    const double v_end = g.value_at(I.hi);
    lo = std::min(lo, v_end);
    hi = std::max(hi, v_end);
    const std::size_t n = g.xs.size() - 1;
    std::size_t i = static_cast<std::size_t>(std::ceil(I.lo * static_cast<double>(n)));
    for (; i < g.xs.size() && g.xs[i] <= I.hi; ++i) {
        lo = std::min(lo, g.ys[i]);
        hi = std::max(hi, g.ys[i]);
    }
    return hi - lo;
}

/// Minimal axis-aligned rectangle containing the sampled graph over I.
/// Its height equals oscillation(g, I).
inline Rectangle framing_rectangle(const SampledGraph& g, const Interval& I) {
    if (I.lo < 0.0 || I.hi > 1.0)
        throw std::domain_error("framing_rectangle: interval outside [0,1]");
    double lo = g.value_at(I.lo), hi = lo;
    const double v_end = g.value_at(I.hi);
    lo = std::min(lo, v_end);
    hi = std::max(hi, v_end);
    const std::size_t n = g.xs.size() - 1;
    std::size_t i = static_cast<std::size_t>(std::ceil(I.lo * static_cast<double>(n)));
    for (; i < g.xs.size() && g.xs[i] <= I.hi; ++i) {
        lo = std::min(lo, g.ys[i]);
        hi = std::max(hi, g.ys[i]);
    }
    return {I, Interval(lo, hi)};
}

/// CSV (`x,y`, 17 significant digits) plus a key=value metadata block.
inline void write_graph_csv(const SampledGraph& g, std::ostream& out) {
    out << "x,y\n";
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        out << detail::format17(g.xs[i]) << ',' << detail::format17(g.ys[i]) << '\n';
}

inline void write_graph_metadata(const SampledGraph& g, std::ostream& out) {
    out << "name=" << g.name << '\n'
        << "nodes=" << g.nodes() << '\n'
        << g.params << "eval_error=" << detail::format17(g.eval_error) << '\n';
}

}  // namespace grigid
