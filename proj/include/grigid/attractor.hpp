#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "grigid/point_set.hpp"
#include "grigid/rng.hpp"
#include "grigid/similitude.hpp"

namespace grigid {

/// One application of the set map A |-> union_i S_i(A). Output order is
/// map-major, then input order; size is k * |ps|.
inline PointSet hutchinson_step(const Ifs& ifs, const PointSet& ps) {
    if (ps.empty()) throw std::invalid_argument("hutchinson_step: empty point set");
    std::vector<Vec2> out;
    out.reserve(ps.size() * static_cast<std::size_t>(ifs.size()));
    for (const Similitude& s : ifs.maps())
        for (const Vec2& p : ps.points) out.push_back(apply(s, p));
    return PointSet(std::move(out));
}

/// Merges points that coincide within `tol` (absolute, per axis bucket).
/// First occurrence wins, so output order is deterministic.
inline PointSet dedup(const PointSet& ps, double tol = 1e-12) {
    if (tol <= 0.0) return ps;
    struct Key {
        std::int64_t x, y;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return rng::mix(static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull ^
                            static_cast<std::uint64_t>(k.y));
        }
    };
    std::unordered_set<Key, KeyHash> seen;
    seen.reserve(ps.size());
    std::vector<Vec2> out;
    out.reserve(ps.size());
    for (const Vec2& p : ps.points) {
        const Key k{static_cast<std::int64_t>(std::llround(p.x / tol)),
                    static_cast<std::int64_t>(std::llround(p.y / tol))};
        if (seen.insert(k).second) out.push_back(p);
    }
    return PointSet(std::move(out));
}

enum class IterationMode { Deterministic, ChaosFallback };

struct AttractorResult {
    PointSet points;
    IterationMode mode{IterationMode::Deterministic};
    int deterministic_depth{0};  // full-expansion steps actually taken
    std::uint64_t rng_seed{0};   // meaningful only in fallback mode
};

/// Deterministic Hutchinson iteration from a seed set. When k^depth would
/// exceed the point budget, the remaining depth is covered by chaos-game
/// sampling: each point follows a uniformly random letter per step, keeping
/// the population size fixed. The mode used is reported in the result.
inline AttractorResult iterate_attractor(const Ifs& ifs, const PointSet& seed,
                                         int depth, std::size_t point_budget,
                                         std::uint64_t rng_seed = 0,
                                         double dedup_tol = 1e-12) {
    if (depth < 1) throw std::invalid_argument("iterate_attractor: depth must be >= 1");
    if (point_budget == 0)
        throw std::invalid_argument("iterate_attractor: zero point budget");
    if (seed.empty()) throw std::invalid_argument("iterate_attractor: empty seed");

    AttractorResult res;
    res.rng_seed = rng_seed;
    PointSet cur = dedup(seed, dedup_tol);
    const std::size_t k = static_cast<std::size_t>(ifs.size());
    int step = 0;
    for (; step < depth; ++step) {
        if (cur.size() * k > point_budget) break;
        cur = dedup(hutchinson_step(ifs, cur), dedup_tol);
    }
    res.deterministic_depth = step;
    if (step < depth) {
        res.mode = IterationMode::ChaosFallback;
        for (; step < depth; ++step) {
            const std::uint64_t stream = rng::split(rng_seed, static_cast<std::uint64_t>(step));
            for (std::size_t i = 0; i < cur.points.size(); ++i) {
                const int letter =
                    1 + static_cast<int>(rng::at(stream, i) % k);
                cur.points[i] = apply(ifs.map(letter), cur.points[i]);
            }
        }
    }
    res.points = std::move(cur);
    return res;
}

/// Random-orbit sampling of the attractor. Starts at the fixed point of the
/// first map (a point of the attractor), so every emitted point lies on the
/// attractor up to rounding; burn-in is kept as an extra guard for callers
/// that seed elsewhere. Deterministic for a given seed.
inline PointSet chaos_game(const Ifs& ifs, std::size_t n_points,
                           std::uint64_t rng_seed, std::size_t burn_in = 32) {
    if (n_points < 1) throw std::invalid_argument("chaos_game: n_points must be >= 1");
    const std::size_t k = static_cast<std::size_t>(ifs.size());
    Vec2 p = fixed_point(ifs.map(1));
    std::vector<Vec2> out;
    out.reserve(n_points);
    for (std::size_t i = 0; i < burn_in + n_points; ++i) {
        const int letter = 1 + static_cast<int>(rng::at(rng_seed, i) % k);
        p = apply(ifs.map(letter), p);
        if (i >= burn_in) out.push_back(p);
    }
    return PointSet(std::move(out));
}

}  // namespace grigid
