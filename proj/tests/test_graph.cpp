#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "grigid/graph.hpp"
#include "grigid/rng.hpp"

using namespace grigid;

namespace {

// independent partial-sum oracle for the tent series
double takagi_oracle(double x, int terms) {
    double sum = 0.0;
    for (int n = 0; n < terms; ++n) {
        const double arg = std::ldexp(x, n);  // 2^n * x
        const double frac = arg - std::floor(arg);
        sum += std::ldexp(std::min(frac, 1.0 - frac), -n);  // 2^-n * dist
    }
    return sum;
}

}  // namespace

TEST_CASE("sampling the affine catalog entry") {
    const SampledGraph g = sample(AffineSpec{1.0, 0.0}, 2);
    REQUIRE(g.nodes() == 3);
    CHECK(g.ys[0] == 0.0);
    CHECK(g.ys[1] == 0.5);
    CHECK(g.ys[2] == 1.0);
    CHECK(g.eval_error == 0.0);
    CHECK_THROWS_AS(sample(AffineSpec{1.0, 0.0}, 1), std::invalid_argument);
}

TEST_CASE("takagi values against the partial-sum oracle") {
    CHECK(takagi_value(0.5, 50) == Catch::Approx(takagi_oracle(0.5, 51)).margin(1e-15));
    CHECK(takagi_value(0.5, 50) == 0.5);   // only the n=0 term survives
    CHECK(takagi_value(0.25, 50) == 0.5);  // 1/4 + 1/4
    CHECK(takagi_value(1.0 / 3.0, 60) ==
          Catch::Approx(takagi_oracle(1.0 / 3.0, 61)).margin(1e-15));

    // truncation tail bound 2^-(depth+1) dominates the stored eval error
    const SampledGraph g = sample(TakagiSpec{20}, 64);
    const SampledGraph fine = sample(TakagiSpec{60}, 64);
    for (std::size_t i = 0; i < g.nodes(); ++i)
        CHECK(std::fabs(g.ys[i] - fine.ys[i]) <= g.eval_error);
    CHECK(g.eval_error == std::ldexp(1.0, -21));
}

TEST_CASE("weierstrass truncation bound") {
    const SampledGraph coarse = sample(WeierstrassSpec{0.5, 3, 20}, 128);
    const SampledGraph fine = sample(WeierstrassSpec{0.5, 3, 45}, 128);
    const double tail = std::pow(0.5, 21) / (1.0 - 0.5);
    CHECK(coarse.eval_error == Catch::Approx(tail));
    for (std::size_t i = 0; i < coarse.nodes(); ++i)
        CHECK(std::fabs(coarse.ys[i] - fine.ys[i]) <= coarse.eval_error + 1e-12);
    CHECK(sample(WeierstrassSpec{0.5, 3, 40}, 8).ys[0] == Catch::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(sample(WeierstrassSpec{1.5, 3, 40}, 8), std::invalid_argument);
    CHECK_THROWS_AS(sample(WeierstrassSpec{0.5, 2, 40}, 8), std::invalid_argument);  // even b
}

TEST_CASE("cantor-lebesgue digit scan") {
    // exact on scans that terminate in a middle third
    CHECK(cantor_lebesgue_value(0.5, 40) == 0.5);
    CHECK(cantor_lebesgue_value(7.0 / 8.0, 40) == 0.75);  // gap (7/9, 8/9)
    CHECK(cantor_lebesgue_value(0.0, 40) == 0.0);
    CHECK(cantor_lebesgue_value(1.0, 40) == 1.0);
    // monotone on a grid
    const SampledGraph g = sample(CantorLebesgueSpec{40}, 512);
    for (std::size_t i = 0; i + 1 < g.nodes(); ++i) CHECK(g.ys[i] <= g.ys[i + 1] + 1e-15);
    CHECK(g.eval_error == std::ldexp(1.0, -40));
}

TEST_CASE("custom specs resample with inflated error") {
    CustomSpec c;
    c.samples = {{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}};
    c.eval_error = 1e-6;
    const SampledGraph g = sample(FunctionSpec{c}, 10);
    CHECK(g.value_at(0.25) == Catch::Approx(0.5));
    CHECK(g.eval_error >= 1.0);  // inflated by the local modulus estimate
}

TEST_CASE("oscillation of affine graphs is |a| * |I|") {
    const SampledGraph g = sample(AffineSpec{3.0, 0.0}, 4096);
    CHECK(oscillation(g, Interval(0.0, 1.0)) == Catch::Approx(3.0).margin(1e-12));
    CHECK(oscillation(g, Interval(0.25, 0.5)) == Catch::Approx(0.75).margin(1e-12));

    const SampledGraph flat = sample(AffineSpec{0.0, 2.0}, 64);
    CHECK(oscillation(flat, Interval(0.1, 0.9)) == 0.0);

    CHECK_THROWS_AS(oscillation(g, Interval(-0.1, 0.5)), std::domain_error);
    CHECK_THROWS_AS(oscillation(g, Interval(0.5, 1.1)), std::domain_error);
}

TEST_CASE("oscillation is monotone in the interval") {
    const SampledGraph g = sample(TakagiSpec{40}, 1024);
    rng::Stream st(13);
    for (int trial = 0; trial < 100; ++trial) {
        double a = st.next_in(0.0, 1.0), b = st.next_in(0.0, 1.0);
        if (a > b) std::swap(a, b);
        const double pad_lo = st.next_in(0.0, a);
        const double pad_hi = st.next_in(0.0, 1.0 - b);
        const Interval inner(a, b);
        const Interval outer(a - pad_lo, b + pad_hi);
        CHECK(oscillation(g, inner) <= oscillation(g, outer) + 1e-15);
    }
}

TEST_CASE("framing rectangle frames the graph") {
    const SampledGraph line = sample(AffineSpec{1.0, 0.0}, 256);
    const Rectangle r = framing_rectangle(line, Interval(0.0, 1.0));
    CHECK(r.x.lo == 0.0);
    CHECK(r.x.hi == 1.0);
    CHECK(r.y.lo == Catch::Approx(0.0).margin(1e-15));
    CHECK(r.y.hi == Catch::Approx(1.0).margin(1e-15));
    CHECK(r.height() == Catch::Approx(oscillation(line, Interval(0.0, 1.0))));

    const Rectangle half = framing_rectangle(line, Interval(0.0, 0.5));
    CHECK(half.x.hi == 0.5);
    CHECK(half.y.hi == Catch::Approx(0.5).margin(1e-15));

    // takagi maximum: the dense-grid value must confirm the oracle at x=1/3,
    // where every tent term contributes exactly 1/3 * 2^-n
    const SampledGraph tak = sample(TakagiSpec{50}, 1 << 14);
    const Rectangle rt = framing_rectangle(tak, Interval(0.0, 1.0));
    const double oracle_max = takagi_oracle(1.0 / 3.0, 60);
    CHECK(oracle_max == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(rt.y.hi == Catch::Approx(2.0 / 3.0).margin(1e-3));
    CHECK(rt.y.hi <= 2.0 / 3.0 + 1e-12);  // grid max never exceeds the true sup
    CHECK(rt.y.lo >= 0.0);
}

TEST_CASE("x projection") {
    const Rectangle r{Interval(0.0, 0.5), Interval(3.0, 7.0)};
    CHECK(project_x(r).lo == 0.0);
    CHECK(project_x(r).hi == 0.5);
    const Rectangle degenerate{Interval(0.25, 0.75), Interval(1.0, 1.0)};
    CHECK(project_x(degenerate).length() == 0.5);
}

TEST_CASE("graph csv and metadata") {
    const SampledGraph g = sample(TakagiSpec{30}, 4);
    std::ostringstream csv, meta;
    write_graph_csv(g, csv);
    write_graph_metadata(g, meta);
    CHECK(csv.str().rfind("x,y\n", 0) == 0);
    CHECK(meta.str().find("name=takagi") != std::string::npos);
    CHECK(meta.str().find("depth=30") != std::string::npos);
    CHECK(meta.str().find("eval_error=") != std::string::npos);
    // five data lines for n=4
    std::size_t lines = 0;
    for (char ch : csv.str())
        if (ch == '\n') ++lines;
    CHECK(lines == 6);  // header + 5 nodes
}
