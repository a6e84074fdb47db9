// Sampling densities over K, rejection-sampled random sample sets, the
// centered statistic Y_{j,k}(f), and empirical moment checks.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <utility>

#include "qsis/averaging.hpp"
#include "qsis/domain.hpp"
#include "qsis/rng.hpp"
#include "qsis/space.hpp"

namespace qsis {

// Probability density on K, bounded between c1 and c2, normalized so its
// grid quadrature over K equals 1 exactly.
struct SamplingDensity {
    Region K;
    std::function<double(double, double)> pdf; // normalized values
    double c1 = 0.0;                           // inf over K (analytic)
    double c2 = 0.0;                           // sup over K (analytic)
    bool is_product = false;
    std::function<double(double)> pdf1; // set when is_product
    std::function<double(double)> pdf2;
    double sup1 = 0.0; // per-factor envelope bounds for product draws
    double sup2 = 0.0;

    double quadrature() const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < K.a1.range.count; ++i)
            for (Eigen::Index j = 0; j < K.a2.range.count; ++j)
                acc += pdf(K.a1.node(i), K.a2.node(j));
        return acc * K.a1.axis.step * K.a2.axis.step;
    }
};

inline SamplingDensity make_uniform_density(const Region& K) {
    SamplingDensity d;
    d.K = K;
    double m1 = K.measure1(), m2 = K.measure2();
    double value = 1.0 / (m1 * m2);
    d.pdf = [value](double, double) { return value; };
    d.c1 = d.c2 = value;
    d.is_product = true;
    double v1 = 1.0 / m1, v2 = 1.0 / m2;
    d.pdf1 = [v1](double) { return v1; };
    d.pdf2 = [v2](double) { return v2; };
    d.sup1 = v1;
    d.sup2 = v2;
    return d;
}

// Truncated Gaussian bump centered in K (a product density).
inline SamplingDensity make_gaussian_density(const Region& K, double sigma_frac = 0.5) {
    if (!(sigma_frac > 0.0)) throw InvalidParameter("sigma_frac must be positive");
    SamplingDensity d;
    d.K = K;
    double c1 = 0.5 * (K.a1.range.lo + K.a1.range.hi);
    double c2c = 0.5 * (K.a2.range.lo + K.a2.range.hi);
    double s1 = sigma_frac * (K.a1.range.hi - K.a1.range.lo);
    double s2 = sigma_frac * (K.a2.range.hi - K.a2.range.lo);
    auto g1 = [c1, s1](double u) { double z = (u - c1) / s1; return std::exp(-0.5 * z * z); };
    auto g2 = [c2c, s2](double v) { double z = (v - c2c) / s2; return std::exp(-0.5 * z * z); };
    // Normalize each factor by its own grid quadrature.
    double q1 = 0.0, q2 = 0.0;
    for (Eigen::Index i = 0; i < K.a1.range.count; ++i) q1 += g1(K.a1.node(i));
    for (Eigen::Index j = 0; j < K.a2.range.count; ++j) q2 += g2(K.a2.node(j));
    q1 *= K.a1.axis.step;
    q2 *= K.a2.axis.step;
    d.pdf1 = [g1, q1](double u) { return g1(u) / q1; };
    d.pdf2 = [g2, q2](double v) { return g2(v) / q2; };
    d.pdf = [d1 = d.pdf1, d2 = d.pdf2](double u, double v) { return d1(u) * d2(v); };
    d.is_product = true;
    // Factor extrema over K are at the center / the farthest corner.
    auto edge1 = std::max(std::abs(K.a1.range.lo - c1), std::abs(K.a1.range.hi - c1));
    auto edge2 = std::max(std::abs(K.a2.range.lo - c2c), std::abs(K.a2.range.hi - c2c));
    d.sup1 = 1.0 / q1;
    d.sup2 = 1.0 / q2;
    double inf1 = std::exp(-0.5 * edge1 * edge1 / (s1 * s1)) / q1;
    double inf2 = std::exp(-0.5 * edge2 * edge2 / (s2 * s2)) / q2;
    d.c1 = inf1 * inf2;
    d.c2 = d.sup1 * d.sup2;
    return d;
}

// Non-product density proportional to 1 + lambda * (u - lo1)(v - lo2) scaled
// to the unit square of K; used to exercise the joint-mode-only path.
inline SamplingDensity make_tilted_density(const Region& K, double lambda = 0.5) {
    if (!(lambda > 0.0) || lambda >= 1.0) throw InvalidParameter("lambda must lie in (0, 1)");
    SamplingDensity d;
    d.K = K;
    double lo1 = K.a1.range.lo, lo2 = K.a2.range.lo;
    double il1 = 1.0 / (K.a1.range.hi - lo1), il2 = 1.0 / (K.a2.range.hi - lo2);
    auto raw = [=](double u, double v) {
        return 1.0 + lambda * ((u - lo1) * il1) * ((v - lo2) * il2);
    };
    double q = 0.0;
    for (Eigen::Index i = 0; i < K.a1.range.count; ++i)
        for (Eigen::Index j = 0; j < K.a2.range.count; ++j)
            q += raw(K.a1.node(i), K.a2.node(j));
    q *= K.a1.axis.step * K.a2.axis.step;
    d.pdf = [raw, q](double u, double v) { return raw(u, v) / q; };
    d.c1 = 1.0 / q;
    d.c2 = (1.0 + lambda) / q;
    d.is_product = false;
    return d;
}

enum class SampleMode { Joint, Product };

// Random sample points (u_j, v_k), j = 1..n, k = 1..m, stored as n x m
// coordinate arrays. In product mode u_j is shared across k and v_k across j.
struct SampleSet {
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    Eigen::ArrayXXd u; // (j, k)
    Eigen::ArrayXXd v;
    SampleMode mode = SampleMode::Joint;
    std::uint64_t seed = 0;
};

namespace detail {
inline double rejection_1d(Rng& rng, double lo, double hi,
                           const std::function<double(double)>& pdf, double sup) {
    for (;;) {
        double x = rng.uniform(lo, hi);
        if (rng.uniform() * sup <= pdf(x)) return x;
    }
}
} // namespace detail

inline SampleSet draw_sample_set(const SamplingDensity& rho, Eigen::Index n, Eigen::Index m,
                                 std::uint64_t seed, SampleMode mode = SampleMode::Joint) {
    if (n < 1 || m < 1) throw InvalidParameter("sample counts must be >= 1");
    if (mode == SampleMode::Product && !rho.is_product)
        throw InvalidParameter("product sampling mode requested for a non-product density");
    SampleSet set;
    set.n = n;
    set.m = m;
    set.mode = mode;
    set.seed = seed;
    set.u.resize(n, m);
    set.v.resize(n, m);
    const auto& K = rho.K;
    double lo1 = K.a1.range.lo, hi1 = K.a1.range.hi;
    double lo2 = K.a2.range.lo, hi2 = K.a2.range.hi;
    if (mode == SampleMode::Joint) {
        Rng rng = Rng::substream(seed, 0x5A17);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < m; ++k) {
                for (;;) {
                    double uu = rng.uniform(lo1, hi1);
                    double vv = rng.uniform(lo2, hi2);
                    if (rng.uniform() * rho.c2 <= rho.pdf(uu, vv)) {
                        set.u(j, k) = uu;
                        set.v(j, k) = vv;
                        break;
                    }
                }
            }
        return set;
    }
    Rng ru = Rng::substream(seed, 0x5A18);
    Rng rv = Rng::substream(seed, 0x5A19);
    for (Eigen::Index j = 0; j < n; ++j) {
        double uu = detail::rejection_1d(ru, lo1, hi1, rho.pdf1, rho.sup1);
        for (Eigen::Index k = 0; k < m; ++k) set.u(j, k) = uu;
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        double vv = detail::rejection_1d(rv, lo2, hi2, rho.pdf2, rho.sup2);
        for (Eigen::Index j = 0; j < n; ++j) set.v(j, k) = vv;
    }
    return set;
}

// Y(f) at a point: |(f*w)(u, v)| minus the rho-weighted quadrature of
// |f*w| over K. The quadrature is computed once at construction and cached.
template <typename Scalar = double, typename KS = double>
class YStatistic {
  public:
    YStatistic(const GridFunction<Scalar>& f, const AveragingKernel<KS>& kernel,
               const SamplingDensity& rho)
        : f_(f), kernel_(kernel), K_(rho.K) {
        auto conv = grid_convolve(f, kernel, K_);
        expected_abs_ = 0.0;
        for (Eigen::Index i = 0; i < K_.a1.range.count; ++i)
            for (Eigen::Index j = 0; j < K_.a2.range.count; ++j)
                expected_abs_ += rho.pdf(K_.a1.node(i), K_.a2.node(j)) * std::abs(conv(i, j));
        expected_abs_ *= K_.a1.axis.step * K_.a2.axis.step;
    }

    double expected_abs() const { return expected_abs_; }

    double operator()(double u, double v) const {
        if (!K_.contains(u, v)) throw DomainError("y_statistic: point outside K");
        auto vals = convolve(f_, kernel_, K_, {{u, v}});
        return std::abs(vals[0]) - expected_abs_;
    }

  private:
    GridFunction<Scalar> f_;
    AveragingKernel<KS> kernel_;
    Region K_;
    double expected_abs_ = 0.0;
};

template <typename Scalar, typename KS>
double y_statistic(const GridFunction<Scalar>& f, double u, double v,
                   const SamplingDensity& rho, const AveragingKernel<KS>& kernel) {
    return YStatistic<Scalar, KS>(f, kernel, rho)(u, v);
}

struct BoundCheck {
    double observed = 0.0;
    double bound = 0.0;
    bool pass = false;
};

inline BoundCheck make_bound_check(double observed, double bound) {
    return BoundCheck{observed, bound, observed <= bound + 1e-12};
}

// Empirical verification of the moment properties of Y over i.i.d. draws:
// centering of the mean, the sup and variance bounds for Y(f) - Y(g), and
// the normalized-element bounds driven by C~_Phi/a1.
struct YMomentsReport {
    long trials = 0;
    double mean_y_f = 0.0;
    double stderr_y_f = 0.0;
    double grid_centering = 0.0; // exact quadrature identity, ~0 by construction
    BoundCheck diff_sup;         // |Y(f)-Y(g)|      vs 2||f-g||_inf ||w||_1
    BoundCheck diff_var;         // Var(Y(f)-Y(g))   vs 4||f-g||_inf^2 ||w||_1^2
    BoundCheck unit_sup;         // |Y(f)|           vs (C/a1)||w||_1
    BoundCheck unit_var;         // Var(Y(f))        vs (C/a1)^2 ||w||_1^2
};

template <typename Scalar, typename KS>
YMomentsReport empirical_y_moments(const QsisSpace& sp, const GridFunction<Scalar>& f,
                                   const GridFunction<Scalar>& g,
                                   const SamplingDensity& rho,
                                   const AveragingKernel<KS>& kernel, double c_over_a1,
                                   long trials, std::uint64_t seed) {
    if (trials < 1000) throw InvalidParameter("empirical_y_moments needs trials >= 1000");
    YStatistic<Scalar, KS> yf(f, kernel, rho);
    YStatistic<Scalar, KS> yg(g, kernel, rho);
    const Region& K = rho.K;
    // Exact discrete centering: re-weighting |f*w| by rho on the grid gives
    // expectation expected_abs * (quadrature of rho) - expected_abs = 0.
    double rho_mass = rho.quadrature();
    double centering = yf.expected_abs() * rho_mass - yf.expected_abs();

    SampleSet pts = draw_sample_set(rho, trials, 1, seed);
    double sum = 0.0, sum2 = 0.0;
    double max_diff = 0.0, sum_d = 0.0, sum_d2 = 0.0, max_yf = 0.0;
    for (long i = 0; i < trials; ++i) {
        double u = pts.u(i, 0), v = pts.v(i, 0);
        double a = yf(u, v);
        double b = yg(u, v);
        sum += a;
        sum2 += a * a;
        max_yf = std::max(max_yf, std::abs(a));
        double dd = a - b;
        max_diff = std::max(max_diff, std::abs(dd));
        sum_d += dd;
        sum_d2 += dd * dd;
    }
    double n = static_cast<double>(trials);
    double mean = sum / n;
    double var = std::max(0.0, sum2 / n - mean * mean);
    double mean_d = sum_d / n;
    double var_d = std::max(0.0, sum_d2 / n - mean_d * mean_d);

    GridFunction<Scalar> diff(f.axis1, f.axis2);
    diff.values = f.values - g.values;
    MixedExponents inf_exp{kInf, kInf};
    double fg_inf = mixed_norm(diff, sp.domain.Ktilde, inf_exp);
    double w1 = kernel.l1_norm;

    YMomentsReport rep;
    rep.trials = trials;
    rep.mean_y_f = mean;
    rep.stderr_y_f = std::sqrt(var / n);
    rep.grid_centering = centering;
    rep.diff_sup = make_bound_check(max_diff, 2.0 * fg_inf * w1);
    rep.diff_var = make_bound_check(var_d, 4.0 * fg_inf * fg_inf * w1 * w1);
    rep.unit_sup = make_bound_check(max_yf, c_over_a1 * w1);
    rep.unit_var = make_bound_check(var, c_over_a1 * c_over_a1 * w1 * w1);
    (void)K;
    return rep;
}

} // namespace qsis
