#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qsis/domain.hpp"
#include "qsis/rng.hpp"

using namespace qsis;

namespace {

Axis unit_axis(Eigen::Index n = 64, double lo = -0.5, double hi = 1.5) {
    return build_axis(AxisKind::Interval, lo, hi, n);
}

GridFunction<double> constant_fn(const Axis& a1, const Axis& a2, double v) {
    GridFunction<double> f(a1, a2);
    f.values.setConstant(v);
    return f;
}

} // namespace

TEST_CASE("build_axis produces uniform nodes with the Haar weight") {
    Axis a = build_axis(AxisKind::Interval, 0.0, 1.0, 4);
    CHECK(a.step == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a.node(0) == 0.0);
    CHECK(a.node(3) == doctest::Approx(0.75));
    CHECK_THROWS_AS(build_axis(AxisKind::Interval, 0.0, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(build_axis(AxisKind::Interval, 1.0, 1.0, 4), InvalidParameter);

    Axis c = build_axis(AxisKind::Cyclic, 0.0, 2.0, 8);
    CHECK(c.step == doctest::Approx(0.25));
    CHECK(c.node(7) == doctest::Approx(1.75));
    CHECK(c.canonical(2.25) == doctest::Approx(0.25));
    CHECK(c.canonical(-0.25) == doctest::Approx(1.75));
}

TEST_CASE("minkowski_diff on intervals") {
    Axis a = unit_axis(192, -1.0, 2.0); // step 1/64, quarters node-aligned
    Region K = make_region(a, a, 0.0, 1.0, 0.0, 1.0);

    SUBCASE("degenerate W = {0} via a single-step window") {
        // A one-step window [0, step] is the smallest realizable W.
        Region W = make_region(a, a, 0.0, a.step, 0.0, a.step);
        Region D = minkowski_diff(K, W);
        CHECK(D.a1.range.lo == doctest::Approx(0.0 - a.step));
        CHECK(D.a1.range.hi == doctest::Approx(1.0));
    }
    SUBCASE("symmetric W") {
        Region W = make_region(a, a, -0.25, 0.25, -0.25, 0.25);
        Region D = minkowski_diff(K, W);
        CHECK(D.a1.range.lo == doctest::Approx(-0.25));
        CHECK(D.a1.range.hi == doctest::Approx(1.25));
        CHECK(D.a2.range.lo == doctest::Approx(-0.25));
    }
    SUBCASE("one-sided W") {
        Region W = make_region(a, a, 0.0, 0.5, 0.0, 0.5);
        Region D = minkowski_diff(K, W);
        CHECK(D.a1.range.lo == doctest::Approx(-0.5));
        CHECK(D.a1.range.hi == doctest::Approx(1.0));
    }
    SUBCASE("overflow of the grid extent") {
        Axis tight = unit_axis(32, -0.125, 1.125);
        Region Kt = make_region(tight, tight, 0.0, 1.0, 0.0, 1.0);
        Region Wt = make_region(tight, tight, -0.125, 0.125, -0.125, 0.125);
        CHECK_THROWS_AS(minkowski_diff(Kt, Wt), DomainError);
    }
    SUBCASE("monotone: W inside W' gives K-W inside K-W'") {
        Rng rng(7);
        for (int it = 0; it < 50; ++it) {
            double w1 = rng.uniform(0.05, 0.3), w2 = w1 + rng.uniform(0.0, 0.3);
            Region W = make_region(a, a, -w1, w1, -w1, w1);
            Region Wp = make_region(a, a, -w2, w2, -w2, w2);
            Region D = minkowski_diff(K, W);
            Region Dp = minkowski_diff(K, Wp);
            CHECK(Dp.a1.range.lo <= D.a1.range.lo + 1e-15);
            CHECK(Dp.a1.range.hi >= D.a1.range.hi - 1e-15);
        }
    }
}

TEST_CASE("minkowski_diff wraps to the full circle on cyclic axes") {
    Axis c = build_axis(AxisKind::Cyclic, 0.0, 1.0, 64);
    Region K = make_region(c, c, 0.0, 0.75, 0.0, 0.75);
    Region W = make_region(c, c, -0.25, 0.25, -0.25, 0.25);
    Region D = minkowski_diff(K, W);
    // [0 - 0.25, 0.75 + 0.25] spans 1.25 >= period: full circle.
    CHECK(D.a1.range.count == 64);
    CHECK(D.a1.measure() == doctest::Approx(1.0));
}

TEST_CASE("mixed_norm on constants") {
    Axis a = unit_axis();
    Region K = make_region(a, a, 0.0, 1.0, 0.0, 1.0);
    auto f = constant_fn(a, a, 1.0);

    CHECK(mixed_norm(f, K, make_exponents(2, 2)) == doctest::Approx(1.0).epsilon(1e-12));

    // c = 2 on a region with mu1 = 2, mu2 = 3 at p = 3, q = 2:
    // 2 * 3^{1/2} * 2^{1/3}.
    Axis b = build_axis(AxisKind::Interval, 0.0, 4.0, 256);
    Region R = make_region(b, b, 0.0, 2.0, 0.5, 3.5);
    auto g = constant_fn(b, b, 2.0);
    double expect = 2.0 * std::sqrt(3.0) * std::cbrt(2.0);
    CHECK(mixed_norm(g, R, make_exponents(3, 2)) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(4.3645).epsilon(1e-4));

    // sup norm picks the max (node (20, 24) lies inside K).
    auto h = constant_fn(a, a, 0.0);
    h.values(20, 24) = -7.0;
    CHECK(mixed_norm(h, K, make_exponents(kInf, kInf)) == doctest::Approx(7.0));
}

TEST_CASE("indicator quadrature equals the product measure exactly") {
    Axis a = unit_axis();
    Rng rng(3);
    for (int it = 0; it < 20; ++it) {
        double lo1 = rng.uniform(-0.5, 0.5), hi1 = lo1 + rng.uniform(0.1, 0.9);
        double lo2 = rng.uniform(-0.5, 0.5), hi2 = lo2 + rng.uniform(0.1, 0.9);
        Region R = make_region(a, a, lo1, hi1, lo2, hi2);
        GridFunction<double> f(a, a);
        for (Eigen::Index i = 0; i < R.a1.range.count; ++i)
            for (Eigen::Index j = 0; j < R.a2.range.count; ++j)
                f.values(R.a1.node_index(i), R.a2.node_index(j)) = 1.0;
        double norm = mixed_norm(f, R, make_exponents(1, 1));
        CHECK(norm == R.measure1() * R.measure2());
        CHECK(R.measure1() == doctest::Approx(R.a1.range.count * a.step));
    }
}

TEST_CASE("norm axioms: homogeneity and triangle inequality") {
    Axis a = unit_axis(48);
    Region K = make_region(a, a, -0.25, 1.25, -0.25, 1.25);
    const double exps[5] = {1.0, 1.5, 2.0, 3.0, kInf};
    Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        MixedExponents e{exps[static_cast<int>(rng.uniform(0, 5))],
                         exps[static_cast<int>(rng.uniform(0, 5))]};
        GridFunction<double> f(a, a), g(a, a);
        for (Eigen::Index i = 0; i < a.num_points; ++i)
            for (Eigen::Index j = 0; j < a.num_points; ++j) {
                f.values(i, j) = rng.gaussian();
                g.values(i, j) = rng.gaussian();
            }
        double lambda = rng.uniform(-3.0, 3.0);
        GridFunction<double> lf(a, a), fg(a, a);
        lf.values = lambda * f.values;
        fg.values = f.values + g.values;
        double nf = mixed_norm(f, K, e), ng = mixed_norm(g, K, e);
        CHECK(mixed_norm(lf, K, e) ==
              doctest::Approx(std::abs(lambda) * nf).epsilon(1e-12));
        CHECK(mixed_norm(fg, K, e) <= nf + ng + 1e-12 * (nf + ng));
    }
}

TEST_CASE("Holder-type monotonicity of L1 against L^{p,q}") {
    Axis a = unit_axis(48);
    Region K = make_region(a, a, 0.0, 1.0, 0.0, 0.5);
    double mu1 = K.measure1(), mu2 = K.measure2();
    Rng rng(13);
    const double exps[4] = {1.0, 1.5, 2.0, 3.0};
    for (int it = 0; it < 200; ++it) {
        MixedExponents e{exps[static_cast<int>(rng.uniform(0, 4))],
                         exps[static_cast<int>(rng.uniform(0, 4))]};
        GridFunction<double> f(a, a);
        for (Eigen::Index i = 0; i < a.num_points; ++i)
            for (Eigen::Index j = 0; j < a.num_points; ++j) f.values(i, j) = rng.gaussian();
        double lhs = mixed_norm(f, K, MixedExponents{1.0, 1.0});
        double rhs = std::pow(mu2, (e.q - 1.0) / e.q) * std::pow(mu1, (e.p - 1.0) / e.p) *
                     mixed_norm(f, K, e);
        CHECK(lhs <= rhs + 1e-12 * std::max(1.0, rhs));
    }
}

TEST_CASE("seq_mixed_norm") {
    Eigen::ArrayXXd single = Eigen::ArrayXXd::Zero(3, 3);
    single(1, 2) = 5.0;
    CHECK(seq_mixed_norm(single, make_exponents(2, 2)) == doctest::Approx(5.0));

    Eigen::ArrayXXd ones = Eigen::ArrayXXd::Ones(2, 2);
    CHECK(seq_mixed_norm(ones, make_exponents(2, 2)) == doctest::Approx(2.0));

    Eigen::ArrayXXd c(2, 2);
    c << 3.0, 4.0, 0.0, 0.0;
    CHECK(seq_mixed_norm(c, make_exponents(1, 2)) == doctest::Approx(5.0));

    // Multi-generator arrays sum their norms.
    std::vector<Eigen::ArrayXXd> both{single, c};
    CHECK(seq_mixed_norm(both, make_exponents(1, 2)) ==
          doctest::Approx(5.0 + seq_mixed_norm(single, make_exponents(1, 2))));
}

TEST_CASE("grid function factory rejects bad values") {
    Axis a = unit_axis(16);
    Eigen::ArrayXXd vals = Eigen::ArrayXXd::Zero(16, 16);
    vals(3, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(make_grid_function(a, a, vals), InvalidParameter);
    Eigen::ArrayXXd wrong = Eigen::ArrayXXd::Zero(8, 16);
    CHECK_THROWS_AS(make_grid_function(a, a, wrong), InvalidParameter);
}

TEST_CASE("W must contain the identity") {
    Axis a = unit_axis();
    CHECK_THROWS_AS(make_product_domain(a, a, 0.0, 1.0, 0.0, 1.0, 0.125, 0.25, -0.25, 0.25),
                    InvalidParameter);
}

TEST_CASE("bilinear interpolation reproduces bilinear functions") {
    Axis a = unit_axis(32);
    auto f = sample_on_grid(a, a, [](double u, double v) { return 2.0 * u - 3.0 * v + u * 0.0; });
    Rng rng(5);
    for (int it = 0; it < 100; ++it) {
        double u = rng.uniform(-0.5, 1.4), v = rng.uniform(-0.5, 1.4);
        CHECK(interpolate(f, u, v) == doctest::Approx(2.0 * u - 3.0 * v).epsilon(1e-12));
    }
}
