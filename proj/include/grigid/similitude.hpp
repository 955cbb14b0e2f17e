#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grigid/geometry.hpp"

namespace grigid {

/// Contracting planar similitude p |-> ratio * R(angle) * p + translation,
/// where R(t) has rows (cos t, sin t) and (-sin t, cos t).
struct Similitude {
    double ratio;
    double angle;  // normalized to [0, 2*pi)
    Vec2 translation;

    Similitude(double r, double theta, Vec2 b)
        : ratio(r), angle(normalize_angle(theta)), translation(b) {
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("Similitude: ratio must lie in (0,1)");
        if (!std::isfinite(theta) || !std::isfinite(b.x) || !std::isfinite(b.y))
            throw std::invalid_argument("Similitude: parameters must be finite");
    }
};

inline Vec2 apply(const Similitude& s, Vec2 p) {
    const double c = std::cos(s.angle);
    const double sn = std::sin(s.angle);
    return {s.ratio * (c * p.x + sn * p.y) + s.translation.x,
            s.ratio * (-sn * p.x + c * p.y) + s.translation.y};
}

/// outer(inner(p)) collapsed into a single similitude. Rotations commute, so
/// the angle is the sum and the ratio the product.
inline Similitude compose(const Similitude& outer, const Similitude& inner) {
    return {outer.ratio * inner.ratio, outer.angle + inner.angle,
            apply(outer, inner.translation)};
}

/// Unique fixed point, from the direct 2x2 solve of (I - r*R) p = b.
/// Always solvable: det = 1 - 2 r cos(angle) + r^2 >= (1-r)^2 > 0.
inline Vec2 fixed_point(const Similitude& s) {
    const double c = std::cos(s.angle);
    const double sn = std::sin(s.angle);
    const double a11 = 1.0 - s.ratio * c;
    const double a12 = -s.ratio * sn;
    const double a21 = s.ratio * sn;
    const double a22 = 1.0 - s.ratio * c;
    const double det = a11 * a22 - a12 * a21;
    const Vec2 b = s.translation;
    return {(b.x * a22 - a12 * b.y) / det, (a11 * b.y - a21 * b.x) / det};
}

enum class RotationKind { Identity, PointReflection, Other };

/// Classifies an angle modulo 2*pi against {0, pi} with an explicit tolerance.
inline RotationKind classify_rotation(double angle, double tol = 1e-9) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify_rotation: tol must be positive");
    if (circle_distance(angle, 0.0) <= tol) return RotationKind::Identity;
    if (circle_distance(angle, kPi) <= tol) return RotationKind::PointReflection;
    return RotationKind::Other;
}

inline const char* to_string(RotationKind k) {
    switch (k) {
        case RotationKind::Identity: return "identity";
        case RotationKind::PointReflection: return "point-reflection";
        default: return "other";
    }
}

/// Finite sequence of 1-based map indices. letters[0] is applied first,
/// letters.back() last (outermost).
struct Word {
    std::vector<int> letters;

    std::size_t size() const { return letters.size(); }
    bool operator==(const Word&) const = default;
    bool operator<(const Word& o) const { return letters < o.letters; }
};

inline std::string to_string(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) s.push_back('.');
        s += std::to_string(w.letters[i]);
    }
    return s;
}

/// Iterated function system: a nonempty ordered list of contracting
/// similitudes. Derived constants are computed once at construction.
class Ifs {
public:
    explicit Ifs(std::vector<Similitude> maps) : maps_(std::move(maps)) {
        if (maps_.empty()) throw std::invalid_argument("Ifs: needs at least one map");
        r_min_ = r_max_ = maps_.front().ratio;
        for (const auto& m : maps_) {
            r_min_ = std::min(r_min_, m.ratio);
            r_max_ = std::max(r_max_, m.ratio);
        }
    }

    const std::vector<Similitude>& maps() const { return maps_; }
    int size() const { return static_cast<int>(maps_.size()); }

    /// 1-based access matching word letters.
    const Similitude& map(int letter) const {
        if (letter < 1 || letter > size())
            throw std::invalid_argument("Ifs: letter " + std::to_string(letter) +
                                        " out of range 1.." + std::to_string(size()));
        return maps_[static_cast<std::size_t>(letter - 1)];
    }

    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    /// Witness-length constant r_min / 2; always in (0, 1/2).
    double half_min_ratio() const { return 0.5 * r_min_; }

private:
    std::vector<Similitude> maps_;
    double r_min_{0};
    double r_max_{0};
};

inline void validate_word(const Ifs& ifs, const Word& w) {
    if (w.letters.empty()) throw std::invalid_argument("Word: must be nonempty");
    for (int letter : w.letters) ifs.map(letter);  // throws on out-of-range
}

/// Composite map of a word: letters applied left to right, the final letter
/// outermost. The composite ratio is the exact product of the letter ratios.
inline Similitude compose_word(const Ifs& ifs, const Word& w) {
    validate_word(ifs, w);
    Similitude acc = ifs.map(w.letters.front());
    for (std::size_t i = 1; i < w.letters.size(); ++i)
        acc = compose(ifs.map(w.letters[i]), acc);
    return acc;
}

inline double word_ratio(const Ifs& ifs, const Word& w) {
    validate_word(ifs, w);
    double r = 1.0;
    for (int letter : w.letters) r *= ifs.map(letter).ratio;
    return r;
}

/// Solves sum r_i^s = 1 by bisection on the strictly decreasing map
/// s |-> sum r_i^s. Root bracketed by doubling, then bisected to full
/// precision; |sum - 1| <= 1e-12 at the returned exponent.
inline double moran_dimension(std::span<const double> ratios) {
    if (ratios.empty()) throw std::invalid_argument("moran_dimension: empty ratio list");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("moran_dimension: ratios must lie in (0,1)");
    auto total = [&](double s) {
        double t = 0.0;
        for (double r : ratios) t += std::pow(r, s);
        return t;
    };
    double lo = 0.0;
    if (total(lo) <= 1.0) return 0.0;  // single map: r^0 = 1 exactly
    double hi = 1.0;
    while (total(hi) > 1.0) {
        hi *= 2.0;
        if (hi > 0x1p60) throw std::runtime_error("moran_dimension: no finite root");
    }
    for (int it = 0; it < 200 && lo < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (total(mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double moran_dimension(const Ifs& ifs) {
    std::vector<double> r;
    r.reserve(ifs.maps().size());
    for (const auto& m : ifs.maps()) r.push_back(m.ratio);
    return moran_dimension(std::span<const double>(r));
}

}  // namespace grigid
