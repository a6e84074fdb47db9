// Concrete group axes (real intervals and cyclic groups), product regions
// with left-endpoint Haar quadrature, grid functions, and the mixed
// L^{p,q} / l^{p,q} norms.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qsis/errors.hpp"

namespace qsis {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class AxisKind { Interval, Cyclic };

// Uniform grid on one group factor. Nodes are start + i*step for
// i = 0..num_points-1; each node carries Haar weight `step` (left-endpoint
// rule, so the grid covers [start, end) exactly).
struct Axis {
    AxisKind kind = AxisKind::Interval;
    double start = 0.0;
    double end = 1.0;
    Eigen::Index num_points = 2;
    double step = 0.5;

    double node(Eigen::Index i) const { return start + static_cast<double>(i) * step; }
    double period() const { return end - start; }

    // Reduce a group coordinate to [start, start + period) on cyclic axes.
    double canonical(double x) const {
        if (kind != AxisKind::Cyclic) return x;
        double p = period();
        double y = std::fmod(x - start, p);
        if (y < 0.0) y += p;
        return start + y;
    }
};

inline bool same_axis(const Axis& a, const Axis& b) {
    return a.kind == b.kind && a.start == b.start && a.end == b.end &&
           a.num_points == b.num_points;
}

inline Axis build_axis(AxisKind kind, double start, double end, Eigen::Index num_points) {
    if (!(end > start)) throw InvalidParameter("invalid axis: end must exceed start");
    if (num_points < 2) throw InvalidParameter("invalid axis: num_points must be >= 2");
    Axis a;
    a.kind = kind;
    a.start = start;
    a.end = end;
    a.num_points = num_points;
    a.step = (end - start) / static_cast<double>(num_points);
    return a;
}

// Contiguous run of nodes on one axis (wrapping on cyclic axes): the grid
// realization of the closed interval [lo, hi], snapped outward to nodes.
struct AxisRange {
    Eigen::Index first = 0; // index of the first node
    Eigen::Index count = 0; // number of nodes; node set is {first..first+count-1 mod n}
    double lo = 0.0;        // snapped bounds; hi - lo == count * step
    double hi = 0.0;
};

// One-axis region: axis plus its realized node range.
struct AxisInterval {
    Axis axis;
    AxisRange range;

    double measure() const { return static_cast<double>(range.count) * axis.step; }
    Eigen::Index node_index(Eigen::Index k) const {
        Eigen::Index i = range.first + k;
        if (axis.kind == AxisKind::Cyclic) i %= axis.num_points;
        return i;
    }
    double node(Eigen::Index k) const { return range.lo + static_cast<double>(k) * axis.step; }
    bool contains(double x) const {
        double y = axis.kind == AxisKind::Cyclic && (x < range.lo || x > range.hi)
                       ? axis.canonical(x)
                       : x;
        if (axis.kind == AxisKind::Cyclic && y < range.lo) y += axis.period();
        return y >= range.lo - 1e-12 && y <= range.hi + 1e-12;
    }
};

namespace detail {
inline Eigen::Index snap_down(const Axis& a, double x) {
    return static_cast<Eigen::Index>(std::floor((x - a.start) / a.step + 1e-9));
}
inline Eigen::Index snap_up(const Axis& a, double x) {
    return static_cast<Eigen::Index>(std::ceil((x - a.start) / a.step - 1e-9));
}
} // namespace detail

inline AxisInterval make_axis_interval(const Axis& axis, double lo, double hi) {
    if (!(hi > lo)) throw InvalidParameter("region interval must have positive length");
    AxisInterval r;
    r.axis = axis;
    if (axis.kind == AxisKind::Cyclic && hi - lo >= axis.period() - 1e-12) {
        r.range.first = 0;
        r.range.count = axis.num_points;
        r.range.lo = axis.start;
        r.range.hi = axis.end;
        return r;
    }
    if (axis.kind == AxisKind::Cyclic) {
        double p = axis.period();
        double clo = axis.canonical(lo);
        double chi = clo + (hi - lo);
        Eigen::Index ilo = detail::snap_down(axis, clo);
        Eigen::Index ihi = detail::snap_up(axis, chi);
        if (ihi - ilo > axis.num_points) ihi = ilo + axis.num_points;
        r.range.first = ((ilo % axis.num_points) + axis.num_points) % axis.num_points;
        r.range.count = ihi - ilo;
        r.range.lo = axis.start + static_cast<double>(ilo) * axis.step;
        r.range.hi = axis.start + static_cast<double>(ihi) * axis.step;
        (void)p;
        return r;
    }
    Eigen::Index ilo = detail::snap_down(axis, lo);
    Eigen::Index ihi = detail::snap_up(axis, hi);
    if (ilo < 0 || ihi > axis.num_points)
        throw DomainError("region exceeds the grid extent of its axis");
    r.range.first = ilo;
    r.range.count = ihi - ilo;
    r.range.lo = axis.node(ilo);
    r.range.hi = axis.node(ihi - 1) + axis.step;
    return r;
}

// Rectangular region K1 x K2 on a product grid.
struct Region {
    AxisInterval a1;
    AxisInterval a2;

    double measure1() const { return a1.measure(); }
    double measure2() const { return a2.measure(); }
    bool contains(double u, double v) const { return a1.contains(u) && a2.contains(v); }
};

inline Region make_region(const Axis& axis1, const Axis& axis2, double lo1, double hi1,
                          double lo2, double hi2) {
    return Region{make_axis_interval(axis1, lo1, hi1), make_axis_interval(axis2, lo2, hi2)};
}

inline AxisInterval minkowski_diff_axis(const AxisInterval& k, const AxisInterval& w) {
    if (!same_axis(k.axis, w.axis))
        throw InvalidParameter("minkowski_diff: regions on different axes");
    double lo = k.range.lo - w.range.hi;
    double hi = k.range.hi - w.range.lo;
    return make_axis_interval(k.axis, lo, hi);
}

// K (-) W = {k - w}: per-axis interval [loK - hiW, hiK - loW], snapped
// outward; reduces modulo the period (to the full circle if it wraps) on
// cyclic axes; throws DomainError if an interval axis cannot hold the result.
inline Region minkowski_diff(const Region& k, const Region& w) {
    return Region{minkowski_diff_axis(k.a1, w.a1), minkowski_diff_axis(k.a2, w.a2)};
}

// K, the averaging window W, and the enlarged window K~ = K (-) W.
struct ProductDomain {
    Axis axis1;
    Axis axis2;
    Region K;
    Region W;
    Region Ktilde;
};

inline ProductDomain make_product_domain(const Axis& axis1, const Axis& axis2,
                                         double k_lo1, double k_hi1, double k_lo2, double k_hi2,
                                         double w_lo1, double w_hi1, double w_lo2, double w_hi2) {
    if (w_lo1 > 0.0 || w_hi1 < 0.0 || w_lo2 > 0.0 || w_hi2 < 0.0)
        throw InvalidParameter("W must contain the identity element (0,0)");
    ProductDomain d;
    d.axis1 = axis1;
    d.axis2 = axis2;
    d.K = make_region(axis1, axis2, k_lo1, k_hi1, k_lo2, k_hi2);
    d.W = make_region(axis1, axis2, w_lo1, w_hi1, w_lo2, w_hi2);
    d.Ktilde = minkowski_diff(d.K, d.W);
    return d;
}

// Mixed exponents (p, q); the boundary values 1 and infinity are allowed.
struct MixedExponents {
    double p = 2.0;
    double q = 2.0;
};

inline MixedExponents make_exponents(double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw InvalidParameter("mixed exponents must satisfy 1 <= p,q <= inf");
    return MixedExponents{p, q};
}

// Discretized function on the full product grid.
template <typename Scalar = double>
struct GridFunction {
    Axis axis1;
    Axis axis2;
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> values; // (i1, i2)

    GridFunction() = default;
    GridFunction(const Axis& a1, const Axis& a2)
        : axis1(a1), axis2(a2),
          values(Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(a1.num_points,
                                                                            a2.num_points)) {}

    bool all_finite() const { return values.isFinite().all(); }
};

template <typename Scalar>
GridFunction<Scalar> make_grid_function(const Axis& a1, const Axis& a2,
                                        Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> vals) {
    if (vals.rows() != a1.num_points || vals.cols() != a2.num_points)
        throw InvalidParameter("grid function dimensions do not match the axes");
    if (!vals.isFinite().all())
        throw InvalidParameter("grid function contains non-finite values");
    GridFunction<Scalar> f;
    f.axis1 = a1;
    f.axis2 = a2;
    f.values = std::move(vals);
    return f;
}

// Sample a closed-form evaluator onto the grid.
template <typename F>
auto sample_on_grid(const Axis& a1, const Axis& a2, F&& f)
    -> GridFunction<decltype(f(0.0, 0.0))> {
    using Scalar = decltype(f(0.0, 0.0));
    GridFunction<Scalar> g(a1, a2);
    for (Eigen::Index i = 0; i < a1.num_points; ++i)
        for (Eigen::Index j = 0; j < a2.num_points; ++j)
            g.values(i, j) = f(a1.node(i), a2.node(j));
    return g;
}

// Bilinear interpolation of grid data at an arbitrary point (clamped to the
// grid hull on interval axes; cyclic axes wrap).
template <typename Scalar>
Scalar interpolate(const GridFunction<Scalar>& f, double u, double v) {
    auto locate = [](const Axis& a, double x, Eigen::Index& i0, Eigen::Index& i1, double& t) {
        if (a.kind == AxisKind::Cyclic) {
            double s = (a.canonical(x) - a.start) / a.step;
            Eigen::Index i = static_cast<Eigen::Index>(std::floor(s));
            t = s - static_cast<double>(i);
            i0 = ((i % a.num_points) + a.num_points) % a.num_points;
            i1 = (i0 + 1) % a.num_points;
            return;
        }
        double s = (x - a.start) / a.step;
        double smax = static_cast<double>(a.num_points - 1);
        s = std::clamp(s, 0.0, smax);
        i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(s)), a.num_points - 2);
        i1 = i0 + 1;
        t = s - static_cast<double>(i0);
    };
    Eigen::Index r0, r1, c0, c1;
    double tu, tv;
    locate(f.axis1, u, r0, r1, tu);
    locate(f.axis2, v, c0, c1, tv);
    return (1.0 - tu) * (1.0 - tv) * f.values(r0, c0) + tu * (1.0 - tv) * f.values(r1, c0) +
           (1.0 - tu) * tv * f.values(r0, c1) + tu * tv * f.values(r1, c1);
}

namespace detail {
// Inner q-norm along a row of region nodes (with Haar weight h), then outer
// p-aggregation; the infinity branches replace sums by maxima (no weight).
template <typename Scalar, typename Inner>
double outer_norm(const AxisInterval& ai, double p, Inner&& inner) {
    if (p == kInf) {
        double mx = 0.0;
        for (Eigen::Index k = 0; k < ai.range.count; ++k)
            mx = std::max(mx, inner(ai.node_index(k)));
        return mx;
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < ai.range.count; ++k)
        acc += std::pow(inner(ai.node_index(k)), p) * ai.axis.step;
    return std::pow(acc, 1.0 / p);
}
} // namespace detail

// ||f||_{L^{p,q}(region)} with the left-endpoint quadrature weights.
template <typename Scalar>
double mixed_norm(const GridFunction<Scalar>& f, const Region& region, const MixedExponents& e) {
    if (!same_axis(f.axis1, region.a1.axis) || !same_axis(f.axis2, region.a2.axis))
        throw InvalidParameter("mixed_norm: region is not on the function's axes");
    // p = q = 2 on a contiguous block is the hot path of the Monte Carlo runs.
    if (e.p == 2.0 && e.q == 2.0 && f.axis1.kind == AxisKind::Interval &&
        f.axis2.kind == AxisKind::Interval) {
        double s2 = f.values
                        .block(region.a1.range.first, region.a2.range.first,
                               region.a1.range.count, region.a2.range.count)
                        .abs2()
                        .sum();
        return std::sqrt(s2 * region.a1.axis.step * region.a2.axis.step);
    }
    const auto& a2 = region.a2;
    auto inner = [&](Eigen::Index i1) {
        if (e.q == kInf) {
            double mx = 0.0;
            for (Eigen::Index k = 0; k < a2.range.count; ++k)
                mx = std::max(mx, std::abs(f.values(i1, a2.node_index(k))));
            return mx;
        }
        double acc = 0.0;
        for (Eigen::Index k = 0; k < a2.range.count; ++k)
            acc += std::pow(std::abs(f.values(i1, a2.node_index(k))), e.q) * a2.axis.step;
        return std::pow(acc, 1.0 / e.q);
    };
    return detail::outer_norm<Scalar>(region.a1, e.p, inner);
}

// l^{p,q} norm of a (s, t)-indexed array; no Haar weights.
template <typename Derived>
double seq_mixed_norm(const Eigen::ArrayBase<Derived>& c, const MixedExponents& e) {
    auto inner = [&](Eigen::Index s) {
        if (e.q == kInf) {
            double mx = 0.0;
            for (Eigen::Index t = 0; t < c.cols(); ++t)
                mx = std::max(mx, static_cast<double>(std::abs(c(s, t))));
            return mx;
        }
        double acc = 0.0;
        for (Eigen::Index t = 0; t < c.cols(); ++t)
            acc += std::pow(static_cast<double>(std::abs(c(s, t))), e.q);
        return std::pow(acc, 1.0 / e.q);
    };
    if (e.p == kInf) {
        double mx = 0.0;
        for (Eigen::Index s = 0; s < c.rows(); ++s) mx = std::max(mx, inner(s));
        return mx;
    }
    double acc = 0.0;
    for (Eigen::Index s = 0; s < c.rows(); ++s) acc += std::pow(inner(s), e.p);
    return std::pow(acc, 1.0 / e.p);
}

// Multi-generator convention: the sum of per-generator norms.
template <typename Scalar>
double seq_mixed_norm(const std::vector<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& per_gen,
                      const MixedExponents& e) {
    double acc = 0.0;
    for (const auto& c : per_gen) acc += seq_mixed_norm(c, e);
    return acc;
}

// 1D L^p norm over an axis interval (Haar-weighted).
template <typename F>
double lp_norm_1d(const AxisInterval& ai, double p, F&& f) {
    if (p == kInf) {
        double mx = 0.0;
        for (Eigen::Index k = 0; k < ai.range.count; ++k)
            mx = std::max(mx, std::abs(f(ai.node(k))));
        return mx;
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < ai.range.count; ++k)
        acc += std::pow(std::abs(f(ai.node(k))), p) * ai.axis.step;
    return std::pow(acc, 1.0 / p);
}

} // namespace qsis
