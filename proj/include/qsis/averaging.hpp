// The averaging kernel, discrete convolution f*omega on K, and numerical
// verifiers for the two Young-type inequalities. Convolution reuses the
// left-endpoint quadrature of the norms, so the inequality checks are exact
// discrete-measure statements.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qsis/domain.hpp"

namespace qsis {

template <typename Scalar = double>
struct AveragingKernel {
    AxisInterval w1; // support intervals, contained in W
    AxisInterval w2;
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> values; // at support nodes
    double l1_norm = 0.0; // cached quadrature of |omega| over the support

    double quadrature_l1() const {
        return (values.abs().template cast<double>().sum()) * w1.axis.step * w2.axis.step;
    }
};

namespace detail {
template <typename Scalar>
void cache_l1(AveragingKernel<Scalar>& k) {
    k.l1_norm = k.values.abs().sum() * k.w1.axis.step * k.w2.axis.step;
    if (!(k.l1_norm > 0.0)) throw InvalidParameter("averaging kernel has zero L1 mass");
}

inline void require_support_in(const AxisInterval& s, const AxisInterval& w,
                               const char* what) {
    if (!same_axis(s.axis, w.axis) || s.range.lo < w.range.lo - 1e-12 ||
        s.range.hi > w.range.hi + 1e-12)
        throw InvalidParameter(std::string(what) + ": kernel support not contained in W");
}
} // namespace detail

// Normalized box kernel on the given support (default: all of W).
inline AveragingKernel<double> make_box_kernel(const Region& W, double l1_target = 1.0) {
    if (!(l1_target > 0.0)) throw InvalidParameter("kernel mass must be positive");
    AveragingKernel<double> k;
    k.w1 = W.a1;
    k.w2 = W.a2;
    double value = l1_target / (W.measure1() * W.measure2());
    k.values = Eigen::ArrayXXd::Constant(W.a1.range.count, W.a2.range.count, value);
    detail::cache_l1(k);
    return k;
}

// Truncated Gaussian bump centered in W, normalized to the target L1 mass.
inline AveragingKernel<double> make_gaussian_kernel(const Region& W, double sigma_frac = 0.25,
                                                    double l1_target = 1.0) {
    if (!(l1_target > 0.0) || !(sigma_frac > 0.0))
        throw InvalidParameter("kernel parameters must be positive");
    AveragingKernel<double> k;
    k.w1 = W.a1;
    k.w2 = W.a2;
    double c1 = 0.5 * (W.a1.range.lo + W.a1.range.hi);
    double c2 = 0.5 * (W.a2.range.lo + W.a2.range.hi);
    double s1 = sigma_frac * (W.a1.range.hi - W.a1.range.lo);
    double s2 = sigma_frac * (W.a2.range.hi - W.a2.range.lo);
    k.values.resize(W.a1.range.count, W.a2.range.count);
    for (Eigen::Index a = 0; a < W.a1.range.count; ++a)
        for (Eigen::Index b = 0; b < W.a2.range.count; ++b) {
            double du = (W.a1.node(a) - c1) / s1;
            double dv = (W.a2.node(b) - c2) / s2;
            k.values(a, b) = std::exp(-0.5 * (du * du + dv * dv));
        }
    double mass = k.values.sum() * W.a1.axis.step * W.a2.axis.step;
    k.values *= l1_target / mass;
    detail::cache_l1(k);
    return k;
}

// Kernel restricted to a sub-rectangle of W (support strictly inside W).
inline AveragingKernel<double> make_box_kernel_on(const Region& W, double lo1, double hi1,
                                                  double lo2, double hi2,
                                                  double l1_target = 1.0) {
    Region sub = make_region(W.a1.axis, W.a2.axis, lo1, hi1, lo2, hi2);
    detail::require_support_in(sub.a1, W.a1, "make_box_kernel_on");
    detail::require_support_in(sub.a2, W.a2, "make_box_kernel_on");
    return make_box_kernel(sub, l1_target);
}

// Complex kernel: a real kernel rotated by a unit phase (same |omega|, L1).
inline AveragingKernel<std::complex<double>> with_phase(const AveragingKernel<double>& k,
                                                        double phi) {
    AveragingKernel<std::complex<double>> out;
    out.w1 = k.w1;
    out.w2 = k.w2;
    out.values = k.values.template cast<std::complex<double>>() *
                 std::complex<double>(std::cos(phi), std::sin(phi));
    out.l1_norm = k.l1_norm;
    return out;
}

// (f*omega)(z) = sum_{w in support} f(z-w) omega(w) h1 h2 for each target z,
// with f given as a closed-form evaluator.
template <typename F, typename KS>
auto convolve(F&& f, const AveragingKernel<KS>& k, const Region& K,
              const std::vector<std::pair<double, double>>& targets)
    -> std::vector<decltype(f(0.0, 0.0) * KS{})> {
    using Out = decltype(f(0.0, 0.0) * KS{});
    double h = k.w1.axis.step * k.w2.axis.step;
    std::vector<Out> out;
    out.reserve(targets.size());
    for (auto [u, v] : targets) {
        if (!K.contains(u, v)) throw DomainError("convolve: target outside K");
        Out acc{};
        for (Eigen::Index a = 0; a < k.w1.range.count; ++a) {
            double wu = k.w1.node(a);
            for (Eigen::Index b = 0; b < k.w2.range.count; ++b)
                acc += f(u - wu, v - k.w2.node(b)) * k.values(a, b);
        }
        out.push_back(acc * h);
    }
    return out;
}

// Grid-data variant: f(z-w) is read by bilinear interpolation.
template <typename FS, typename KS>
auto convolve(const GridFunction<FS>& f, const AveragingKernel<KS>& k, const Region& K,
              const std::vector<std::pair<double, double>>& targets)
    -> std::vector<decltype(FS{} * KS{})> {
    return convolve([&](double u, double v) { return interpolate(f, u, v); }, k, K, targets);
}

namespace detail {
inline Eigen::Index zero_offset(const Axis& a) {
    double o = -a.start / a.step;
    Eigen::Index r = static_cast<Eigen::Index>(std::llround(o));
    if (std::abs(o - static_cast<double>(r)) > 1e-9)
        throw InvalidParameter("grid does not contain the group identity on its lattice");
    return r;
}
} // namespace qsis::detail

// Exact on-grid convolution over every node of `targets` (node-aligned fast
// path; all z-w must land on grid nodes, which holds since K~ = K (-) W).
template <typename FS, typename KS>
auto grid_convolve(const GridFunction<FS>& f, const AveragingKernel<KS>& k,
                   const Region& targets)
    -> Eigen::Array<decltype(FS{} * KS{}), Eigen::Dynamic, Eigen::Dynamic> {
    using Out = decltype(FS{} * KS{});
    const Axis& ax1 = f.axis1;
    const Axis& ax2 = f.axis2;
    Eigen::Index z1 = detail::zero_offset(ax1);
    Eigen::Index z2 = detail::zero_offset(ax2);
    double h = k.w1.axis.step * k.w2.axis.step;
    Eigen::Array<Out, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Array<Out, Eigen::Dynamic, Eigen::Dynamic>::Zero(targets.a1.range.count,
                                                                targets.a2.range.count);
    const bool wraps = ax1.kind == AxisKind::Cyclic || ax2.kind == AxisKind::Cyclic;
    for (Eigen::Index a = 0; a < k.w1.range.count; ++a) {
        Eigen::Index wa = k.w1.node_index(a);
        for (Eigen::Index b = 0; b < k.w2.range.count; ++b) {
            Eigen::Index wb = k.w2.node_index(b);
            Out weight = k.values(a, b) * h;
            if (weight == Out{}) continue;
            Eigen::Index r0 = targets.a1.range.first - wa + z1;
            Eigen::Index c0 = targets.a2.range.first - wb + z2;
            if (!wraps && r0 >= 0 && c0 >= 0 &&
                r0 + targets.a1.range.count <= ax1.num_points &&
                c0 + targets.a2.range.count <= ax2.num_points) {
                out += weight * f.values
                                    .block(r0, c0, targets.a1.range.count,
                                           targets.a2.range.count)
                                    .template cast<Out>();
            } else {
                auto wrap = [](Eigen::Index i, Eigen::Index n) { return ((i % n) + n) % n; };
                for (Eigen::Index i = 0; i < targets.a1.range.count; ++i)
                    for (Eigen::Index j = 0; j < targets.a2.range.count; ++j)
                        out(i, j) += weight * static_cast<Out>(f.values(
                                                  wrap(r0 + i, ax1.num_points),
                                                  wrap(c0 + j, ax2.num_points)));
            }
        }
    }
    return out;
}

// Slack of the scalar Young inequality on one axis:
//   ||f*g||_{L^r(K0)} <= ||f||_{L^p(K0 (-) W0)} ||g||_{L^q(W0)}.
// Returns RHS - LHS, computed with the module's discrete measure.
inline double young_check_scalar(const std::function<double(double)>& f,
                                 const std::function<double(double)>& g,
                                 const AxisInterval& K0, const AxisInterval& W0, double p,
                                 double q, double r) {
    auto inv = [](double e) { return e == kInf ? 0.0 : 1.0 / e; };
    if (std::abs(inv(p) + inv(q) - inv(r) - 1.0) > 1e-12)
        throw InvalidParameter("young_check_scalar: need 1/p + 1/q = 1/r + 1");
    AxisInterval Kt = minkowski_diff_axis(K0, W0);
    double h = W0.axis.step;
    std::vector<double> conv(K0.range.count, 0.0);
    for (Eigen::Index i = 0; i < K0.range.count; ++i) {
        double u = K0.node(i);
        double acc = 0.0;
        for (Eigen::Index b = 0; b < W0.range.count; ++b) {
            double w = W0.node(b);
            acc += f(u - w) * g(w);
        }
        conv[i] = acc * h;
    }
    Eigen::Index idx = 0;
    double lhs = lp_norm_1d(K0, r, [&](double) { return conv[idx++]; });
    double rhs = lp_norm_1d(Kt, p, f) * lp_norm_1d(W0, q, g);
    return rhs - lhs;
}

struct MixedYoungSlacks {
    double pq;  // RHS - LHS of the L^{p,q} inequality
    double inf; // RHS - LHS of the L^inf variant
};

// Mixed-norm Young inequality on a product region:
//   ||f*g||_{L^{p,q}(K0)} <= ||f||_{L^{p,q}(K0 (-) W0)} ||g||_{L^1(W0)}
// and the corresponding L^inf bound.
template <typename FS, typename KS>
MixedYoungSlacks young_check_mixed(const GridFunction<FS>& f, const AveragingKernel<KS>& g,
                                   const Region& K0, const Region& W0,
                                   const MixedExponents& e) {
    detail::require_support_in(g.w1, W0.a1, "young_check_mixed");
    detail::require_support_in(g.w2, W0.a2, "young_check_mixed");
    Region Kt = minkowski_diff(K0, W0);
    auto conv = grid_convolve(f, g, K0);
    GridFunction<decltype(FS{} * KS{})> cf(f.axis1, f.axis2);
    for (Eigen::Index i = 0; i < K0.a1.range.count; ++i)
        for (Eigen::Index j = 0; j < K0.a2.range.count; ++j)
            cf.values(K0.a1.node_index(i), K0.a2.node_index(j)) = conv(i, j);
    double l1g = g.l1_norm;
    MixedYoungSlacks s;
    s.pq = mixed_norm(f, Kt, e) * l1g - mixed_norm(cf, K0, e);
    MixedExponents inf_exp{kInf, kInf};
    s.inf = mixed_norm(f, Kt, inf_exp) * l1g - mixed_norm(cf, K0, inf_exp);
    return s;
}

} // namespace qsis
