#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "grigid/rng.hpp"
#include "grigid/similitude.hpp"

using namespace grigid;

namespace {

Ifs random_ifs(rng::Stream& st, int k) {
    std::vector<Similitude> maps;
    for (int i = 0; i < k; ++i)
        maps.emplace_back(st.next_in(0.1, 0.9),
                          st.next_below(2) ? 0.0 : kPi,
                          Vec2{st.next_in(-1.0, 1.0), st.next_in(-1.0, 1.0)});
    return Ifs(std::move(maps));
}

}  // namespace

TEST_CASE("apply matches the printed rotation convention") {
    // row 1: (cos, sin); row 2: (-sin, cos)
    const Similitude s(0.5, kPi / 2.0, {0.0, 0.0});
    const Vec2 img = apply(s, {1.0, 0.0});
    CHECK(img.x == Catch::Approx(0.0).margin(1e-15));
    CHECK(img.y == Catch::Approx(-0.5).margin(1e-15));  // -sin(pi/2) * 1 * r

    const Similitude half(0.5, 0.0, {0.25, 0.25});
    CHECK(apply(half, {1.0, 1.0}).x == Catch::Approx(0.75));
    CHECK(apply(half, {1.0, 1.0}).y == Catch::Approx(0.75));

    const Similitude refl(0.5, kPi, {0.0, 0.0});
    CHECK(apply(refl, {1.0, 0.0}).x == Catch::Approx(-0.5).margin(1e-12));
    CHECK(apply(refl, {1.0, 0.0}).y == Catch::Approx(0.0).margin(1e-12));

    // fixed point of the right-hand converse map for f(x)=x
    const Similitude s2(0.5, 0.0, {0.5, 0.5});
    CHECK(apply(s2, {1.0, 1.0}).x == Catch::Approx(1.0));
    CHECK(apply(s2, {1.0, 1.0}).y == Catch::Approx(1.0));
}

TEST_CASE("apply scales distances by the ratio") {
    rng::Stream st(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Similitude s(st.next_in(0.05, 0.95), st.next_in(0.0, kTwoPi),
                           {st.next_in(-5.0, 5.0), st.next_in(-5.0, 5.0)});
        const Vec2 p{st.next_in(-10.0, 10.0), st.next_in(-10.0, 10.0)};
        const Vec2 q{st.next_in(-10.0, 10.0), st.next_in(-10.0, 10.0)};
        const double lhs = distance(apply(s, p), apply(s, q));
        const double rhs = s.ratio * distance(p, q);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("similitude validation") {
    CHECK_THROWS_AS(Similitude(1.0, 0.0, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Similitude(0.0, 0.0, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Similitude(1.2, 0.0, {0.0, 0.0}), std::invalid_argument);
    const Similitude s(0.5, -kPi / 2.0, {0.0, 0.0});
    CHECK(s.angle == Catch::Approx(1.5 * kPi));  // normalized into [0, 2*pi)
}

TEST_CASE("compose_word applies letters left to right, last letter outermost") {
    const Ifs ifs({Similitude(0.5, 0.0, {0.0, 0.0}), Similitude(0.5, 0.0, {0.5, 0.0})});
    const Similitude s12 = compose_word(ifs, Word{{1, 2}});
    // S_2(S_1(0)) = S_2(0) = (1/2, 0)
    const Vec2 img = apply(s12, {0.0, 0.0});
    CHECK(img.x == Catch::Approx(0.5));
    CHECK(img.y == Catch::Approx(0.0).margin(1e-15));

    // singleton word is the map itself
    const Similitude s1 = compose_word(ifs, Word{{1}});
    CHECK(s1.ratio == ifs.map(1).ratio);
    CHECK(s1.angle == ifs.map(1).angle);
    CHECK(s1.translation == ifs.map(1).translation);

    CHECK_THROWS_AS(compose_word(ifs, Word{{1, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(compose_word(ifs, Word{{}}), std::invalid_argument);
}

TEST_CASE("word ratio is the exact letter product") {
    const Ifs ifs({Similitude(0.5, 0.0, {0.0, 0.0}),
                   Similitude(1.0 / 3.0, 0.0, {0.5, 0.0})});
    CHECK(word_ratio(ifs, Word{{1, 2, 1}}) == Catch::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(compose_word(ifs, Word{{1, 2, 1}}).ratio ==
          Catch::Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("word concatenation composes") {
    rng::Stream st(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Ifs ifs = random_ifs(st, 3);
        Word alpha, beta;
        const int na = 1 + static_cast<int>(st.next_below(4));
        const int nb = 1 + static_cast<int>(st.next_below(4));
        for (int i = 0; i < na; ++i) alpha.letters.push_back(1 + static_cast<int>(st.next_below(3)));
        for (int i = 0; i < nb; ++i) beta.letters.push_back(1 + static_cast<int>(st.next_below(3)));
        Word cat = alpha;
        cat.letters.insert(cat.letters.end(), beta.letters.begin(), beta.letters.end());

        const Similitude whole = compose_word(ifs, cat);
        const Similitude split = compose(compose_word(ifs, beta), compose_word(ifs, alpha));
        CHECK(whole.ratio == Catch::Approx(split.ratio).epsilon(1e-14));
        const Vec2 probe{st.next_in(-1.0, 1.0), st.next_in(-1.0, 1.0)};
        CHECK(distance(apply(whole, probe), apply(split, probe)) < 1e-10);

        // ratio multiplicativity
        CHECK(word_ratio(ifs, cat) ==
              Catch::Approx(word_ratio(ifs, alpha) * word_ratio(ifs, beta)).epsilon(1e-14));
    }
}

TEST_CASE("fixed points solve the 2x2 system") {
    const Similitude a(0.5, 0.0, {0.25, 0.25});
    const Vec2 fa = fixed_point(a);
    CHECK(fa.x == Catch::Approx(0.5));
    CHECK(fa.y == Catch::Approx(0.5));

    const Similitude b(0.5, 0.0, {0.0, 0.0});
    CHECK(fixed_point(b).x == 0.0);
    CHECK(fixed_point(b).y == 0.0);

    // hand oracle: I - (1/2) rho_pi = diag(3/2, 3/2), so p = (2/3) b
    const Similitude c(0.5, kPi, {0.75, 0.75});
    const Vec2 fc = fixed_point(c);
    CHECK(fc.x == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(fc.y == Catch::Approx(0.5).epsilon(1e-12));

    rng::Stream st(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Similitude s(st.next_in(0.05, 0.95), st.next_in(0.0, kTwoPi),
                           {st.next_in(-3.0, 3.0), st.next_in(-3.0, 3.0)});
        const Vec2 p = fixed_point(s);
        CHECK(distance(apply(s, p), p) <= 1e-12 * (1.0 + s.translation.norm()));
    }
}

TEST_CASE("rotation classification") {
    CHECK(classify_rotation(0.0) == RotationKind::Identity);
    CHECK(classify_rotation(kTwoPi - 1e-12) == RotationKind::Identity);
    CHECK(classify_rotation(kPi) == RotationKind::PointReflection);
    CHECK(classify_rotation(-kPi) == RotationKind::PointReflection);
    CHECK(classify_rotation(kPi / 2.0, 1e-6) == RotationKind::Other);
    CHECK(classify_rotation(kPi / 2.0, 2.0) == RotationKind::Identity);  // huge tol
    CHECK_THROWS_AS(classify_rotation(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("moran dimension") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(moran_dimension(std::span<const double>(half)) == Catch::Approx(1.0).margin(1e-12));

    const std::vector<double> thirds{1.0 / 3.0, 1.0 / 3.0};
    const double s = moran_dimension(std::span<const double>(thirds));
    CHECK(s == Catch::Approx(std::log(2.0) / std::log(3.0)).margin(1e-12));
    CHECK(std::fabs(2.0 * std::pow(1.0 / 3.0, s) - 1.0) <= 1e-12);

    const std::vector<double> single{0.5};
    CHECK(moran_dimension(std::span<const double>(single)) == 0.0);
    const std::vector<double> near_one{0.999999};
    CHECK(moran_dimension(std::span<const double>(near_one)) == 0.0);

    CHECK_THROWS_AS(moran_dimension(std::span<const double>()), std::invalid_argument);
    const std::vector<double> bad{0.5, 1.0};
    CHECK_THROWS_AS(moran_dimension(std::span<const double>(bad)), std::invalid_argument);
}

TEST_CASE("moran dimension is monotone in the map list") {
    rng::Stream st(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> ratios;
        const int k = 1 + static_cast<int>(st.next_below(4));
        for (int i = 0; i < k; ++i) ratios.push_back(st.next_in(0.1, 0.6));
        const double before = moran_dimension(std::span<const double>(ratios));
        ratios.push_back(st.next_in(0.1, 0.6));
        const double after = moran_dimension(std::span<const double>(ratios));
        CHECK(after > before);
        // residual contract
        double total = 0.0;
        for (double r : ratios) total += std::pow(r, after);
        CHECK(std::fabs(total - 1.0) <= 1e-12);
    }
}
