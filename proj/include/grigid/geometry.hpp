#pragma once

#include <cmath>
#include <stdexcept>

namespace grigid {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Plane point / vector, double precision.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double xx, double yy) : x(xx), y(yy) {}

    constexpr Vec2 operator+(Vec2 r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(Vec2 r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline constexpr double distance2(Vec2 a, Vec2 b) { return (a - b).norm2(); }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Maps an angle into [0, 2*pi).
inline double normalize_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Distance between two angles along the circle, in [0, pi].
inline double circle_distance(double a, double b) {
    double d = std::fabs(normalize_angle(a) - normalize_angle(b));
    return d > kTwoPi - d ? kTwoPi - d : d;
}

/// Closed interval [lo, hi] on the real line.
struct Interval {
    double lo{0.0};
    double hi{0.0};

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) throw std::invalid_argument("Interval: lo must not exceed hi");
    }

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Axis-aligned rectangle; degenerate height is allowed (constant functions).
struct Rectangle {
    Interval x;
    Interval y;

    double width() const { return x.length(); }
    double height() const { return y.length(); }
};

/// x-axis projection of a rectangle.
inline Interval project_x(const Rectangle& r) { return r.x; }

}  // namespace grigid
