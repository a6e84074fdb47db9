// Separated shift systems, the local quasi shift-invariant space V_K(Phi)
// with its active shift set, the synthesis operator, and the analyzed
// stability constants (a1, a2, d, C~_Phi).
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <complex>
#include <utility>
#include <vector>

#include "qsis/averaging.hpp"
#include "qsis/domain.hpp"
#include "qsis/generators.hpp"
#include "qsis/rng.hpp"

namespace qsis {

// U-separated shift sequences X in G1 and Y in G2 with separation radii.
struct ShiftSystem {
    std::vector<double> xs;
    std::vector<double> ys;
    double rad1 = 0.0;
    double rad2 = 0.0;
};

// Jittered lattice x_s = s*d1 + delta_s, |delta_s| <= jitter*d1/2, generated
// to cover [lo, hi] on each axis (one spare shift beyond each end).
inline ShiftSystem make_shift_system(double lo1, double hi1, double lo2, double hi2,
                                     double d1, double d2, double jitter,
                                     std::uint64_t seed) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw InvalidParameter("lattice steps must be positive");
    if (!(jitter >= 0.0) || jitter >= 1.0)
        throw InvalidParameter("jitter must lie in [0, 1): separation would be lost");
    ShiftSystem sys;
    sys.rad1 = d1 * (1.0 - jitter) / 2.0;
    sys.rad2 = d2 * (1.0 - jitter) / 2.0;
    auto fill = [jitter](std::vector<double>& out, double lo, double hi, double d, Rng rng) {
        long s_min = static_cast<long>(std::floor(lo / d)) - 1;
        long s_max = static_cast<long>(std::ceil(hi / d)) + 1;
        for (long s = s_min; s <= s_max; ++s) {
            double delta = jitter * d / 2.0 * (2.0 * rng.uniform() - 1.0);
            out.push_back(static_cast<double>(s) * d + delta);
        }
    };
    fill(sys.xs, lo1, hi1, d1, Rng::substream(seed, 0));
    fill(sys.ys, lo2, hi2, d2, Rng::substream(seed, 1));
    return sys;
}

namespace detail {
// Length of [lo + shift, hi + shift] intersect [rlo, rhi], with wraparound on
// cyclic axes.
inline double overlap_len(const Axis& axis, double lo, double hi, double shift, double rlo,
                          double rhi) {
    double a = lo + shift, b = hi + shift;
    if (axis.kind == AxisKind::Cyclic) {
        double p = axis.period();
        double best = 0.0;
        double a0 = axis.canonical(a);
        double b0 = a0 + (b - a);
        for (int t = -1; t <= 1; ++t) {
            double s = std::min(b0 + t * p, rhi) - std::max(a0 + t * p, rlo);
            best = std::max(best, s);
        }
        return best;
    }
    return std::min(b, rhi) - std::max(a, rlo);
}

// Reduce u - shift to the generator's support window on cyclic axes.
inline double support_diff(const Axis& axis, double u, double shift, double supp_lo) {
    double d = u - shift;
    if (axis.kind != AxisKind::Cyclic) return d;
    double p = axis.period();
    double y = std::fmod(d - supp_lo, p);
    if (y < 0.0) y += p;
    return supp_lo + y;
}
} // namespace detail

struct ActiveShifts {
    std::vector<std::pair<int, int>> pairs; // sorted lexicographically
    std::vector<int> s_values;              // sorted distinct active s indices
    std::vector<int> t_values;
};

// Exactly the (s, t) whose shifted generator support meets K~ in positive
// measure (any generator). Throws if empty, or if the provided shifts do not
// bracket the activity window on an interval axis.
inline ActiveShifts active_shifts(const ProductDomain& domain, const GeneratorSet& gens,
                                  const ShiftSystem& shifts) {
    const auto& kt = domain.Ktilde;
    const int r = gens.r;
    const int ns = static_cast<int>(shifts.xs.size());
    const int nt = static_cast<int>(shifts.ys.size());
    std::vector<std::vector<bool>> act1(r, std::vector<bool>(ns));
    std::vector<std::vector<bool>> act2(r, std::vector<bool>(nt));
    for (int i = 0; i < r; ++i) {
        const auto& g = gens.gens[i];
        for (int s = 0; s < ns; ++s)
            act1[i][s] = detail::overlap_len(domain.axis1, g.lo, g.hi, shifts.xs[s],
                                             kt.a1.range.lo, kt.a1.range.hi) > 1e-12;
        for (int t = 0; t < nt; ++t)
            act2[i][t] = detail::overlap_len(domain.axis2, g.lo, g.hi, shifts.ys[t],
                                             kt.a2.range.lo, kt.a2.range.hi) > 1e-12;
    }
    ActiveShifts out;
    std::vector<bool> s_any(ns, false), t_any(nt, false);
    for (int s = 0; s < ns; ++s)
        for (int t = 0; t < nt; ++t) {
            bool on = false;
            for (int i = 0; i < r && !on; ++i) on = act1[i][s] && act2[i][t];
            if (on) {
                out.pairs.emplace_back(s, t);
                s_any[s] = true;
                t_any[t] = true;
            }
        }
    if (out.pairs.empty())
        throw DegenerateSpaceError("no shifted generator support meets K~");
    for (int s = 0; s < ns; ++s)
        if (s_any[s]) out.s_values.push_back(s);
    for (int t = 0; t < nt; ++t)
        if (t_any[t]) out.t_values.push_back(t);
    // Boundary coverage: the shift list must bracket the activity window
    // [lo(K~) - hi(Omega), hi(K~) - lo(Omega)] so no active shift is missing.
    if (domain.axis1.kind == AxisKind::Interval) {
        auto [mn, mx] = std::minmax_element(shifts.xs.begin(), shifts.xs.end());
        if (*mn > kt.a1.range.lo - gens.omega_hi || *mx < kt.a1.range.hi - gens.omega_lo)
            throw InvalidParameter("shift set does not cover the activity window on axis 1");
    }
    if (domain.axis2.kind == AxisKind::Interval) {
        auto [mn, mx] = std::minmax_element(shifts.ys.begin(), shifts.ys.end());
        if (*mn > kt.a2.range.lo - gens.omega_hi || *mx < kt.a2.range.hi - gens.omega_lo)
            throw InvalidParameter("shift set does not cover the activity window on axis 2");
    }
    return out;
}

// The space V_K(Phi): domain, generators, shifts, active index set, and the
// precomputed synthesis matrix over the full grid (column-major node order).
// Immutable after construction.
struct QsisSpace {
    ProductDomain domain;
    GeneratorSet gens;
    ShiftSystem shifts;
    ActiveShifts active;
    Eigen::MatrixXd synth; // (n1*n2) x (r*|active|); node index = i1 + n1*i2

    int r() const { return gens.r; }
    int s0() const { return static_cast<int>(active.s_values.size()); }
    int t0() const { return static_cast<int>(active.t_values.size()); }
    Eigen::Index num_pairs() const { return static_cast<Eigen::Index>(active.pairs.size()); }
    Eigen::Index cols() const { return gens.r * num_pairs(); }
    Eigen::Index col_index(int i, Eigen::Index pair) const { return i * num_pairs() + pair; }

    // phi_i(u - x_s, v - y_t) with cyclic reduction.
    double shifted_gen(int i, int s, int t, double u, double v) const {
        const auto& g = gens.gens[i];
        double du = detail::support_diff(domain.axis1, u, shifts.xs[s], g.lo);
        double dv = detail::support_diff(domain.axis2, v, shifts.ys[t], g.lo);
        return g.profile(du) * g.profile(dv);
    }
};

inline QsisSpace make_qsis_space(const ProductDomain& domain, const GeneratorSet& gens,
                                 const ShiftSystem& shifts) {
    QsisSpace sp;
    sp.domain = domain;
    sp.gens = gens;
    sp.shifts = shifts;
    sp.active = active_shifts(domain, gens, shifts);
    const Axis& a1 = domain.axis1;
    const Axis& a2 = domain.axis2;
    sp.synth.setZero(a1.num_points * a2.num_points, sp.cols());
    // Per-axis profile tables keep construction at O(nodes * shifts) per
    // generator instead of O(nodes * pairs).
    for (int i = 0; i < gens.r; ++i) {
        const auto& g = gens.gens[i];
        Eigen::MatrixXd px(a1.num_points, shifts.xs.size());
        Eigen::MatrixXd py(a2.num_points, shifts.ys.size());
        for (Eigen::Index n = 0; n < a1.num_points; ++n)
            for (std::size_t s = 0; s < shifts.xs.size(); ++s)
                px(n, s) = g.profile(detail::support_diff(a1, a1.node(n), shifts.xs[s], g.lo));
        for (Eigen::Index n = 0; n < a2.num_points; ++n)
            for (std::size_t t = 0; t < shifts.ys.size(); ++t)
                py(n, t) = g.profile(detail::support_diff(a2, a2.node(n), shifts.ys[t], g.lo));
        for (Eigen::Index pair = 0; pair < sp.num_pairs(); ++pair) {
            auto [s, t] = sp.active.pairs[pair];
            Eigen::Index col = sp.col_index(i, pair);
            for (Eigen::Index j = 0; j < a2.num_points; ++j) {
                if (py(j, t) == 0.0) continue;
                sp.synth.col(col).segment(j * a1.num_points, a1.num_points) +=
                    py(j, t) * px.col(s);
            }
        }
    }
    return sp;
}

// Coefficients over the active columns, in the space's (i, s, t) layout.
template <typename Scalar = double>
using CoefficientArray = Eigen::Vector<Scalar, Eigen::Dynamic>;

// Build coefficients from per-generator arrays over the full shift grid
// (|X| x |Y|); nonzero entries at inactive (s, t) violate the convention.
template <typename Scalar>
CoefficientArray<Scalar> coefficients_from_full(
    const QsisSpace& sp,
    const std::vector<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& per_gen) {
    if (static_cast<int>(per_gen.size()) != sp.r())
        throw InvalidParameter("coefficient array has wrong generator count");
    CoefficientArray<Scalar> c = CoefficientArray<Scalar>::Zero(sp.cols());
    for (int i = 0; i < sp.r(); ++i) {
        const auto& a = per_gen[i];
        if (a.rows() != static_cast<Eigen::Index>(sp.shifts.xs.size()) ||
            a.cols() != static_cast<Eigen::Index>(sp.shifts.ys.size()))
            throw InvalidParameter("coefficient array has wrong shift dimensions");
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
            Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(a.rows(), a.cols(),
                                                                         false);
        for (Eigen::Index pair = 0; pair < sp.num_pairs(); ++pair) {
            auto [s, t] = sp.active.pairs[pair];
            c(sp.col_index(i, pair)) = a(s, t);
            seen(s, t) = true;
        }
        for (Eigen::Index s = 0; s < a.rows(); ++s)
            for (Eigen::Index t = 0; t < a.cols(); ++t)
                if (!seen(s, t) && a(s, t) != Scalar{})
                    throw InvalidParameter(
                        "coefficient nonzero at inactive shift (convention violation)");
    }
    return c;
}

// Per-generator (s0 x t0) arrays in active-index order (zeros at holes).
template <typename Scalar>
std::vector<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>> coefficients_to_arrays(
    const QsisSpace& sp, const CoefficientArray<Scalar>& c) {
    std::vector<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>> out;
    auto s_pos = [&](int s) {
        return static_cast<Eigen::Index>(
            std::lower_bound(sp.active.s_values.begin(), sp.active.s_values.end(), s) -
            sp.active.s_values.begin());
    };
    auto t_pos = [&](int t) {
        return static_cast<Eigen::Index>(
            std::lower_bound(sp.active.t_values.begin(), sp.active.t_values.end(), t) -
            sp.active.t_values.begin());
    };
    for (int i = 0; i < sp.r(); ++i) {
        Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
            Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(sp.s0(), sp.t0());
        for (Eigen::Index pair = 0; pair < sp.num_pairs(); ++pair) {
            auto [s, t] = sp.active.pairs[pair];
            a(s_pos(s), t_pos(t)) = c(sp.col_index(i, pair));
        }
        out.push_back(std::move(a));
    }
    return out;
}

// l^{p,q} norm of a coefficient vector (sum of per-generator norms).
template <typename Scalar>
double coefficient_norm(const QsisSpace& sp, const CoefficientArray<Scalar>& c,
                        const MixedExponents& e) {
    return seq_mixed_norm(coefficients_to_arrays(sp, c), e);
}

// f = sum c(i,s,t) phi_i(. - x_s, . - y_t) over the full grid.
template <typename Scalar>
GridFunction<Scalar> synthesize(const QsisSpace& sp, const CoefficientArray<Scalar>& c) {
    if (c.size() != sp.cols()) throw InvalidParameter("coefficient vector has wrong size");
    GridFunction<Scalar> f(sp.domain.axis1, sp.domain.axis2);
    Eigen::Vector<Scalar, Eigen::Dynamic> flat;
    if constexpr (std::is_same_v<Scalar, double>) {
        flat = sp.synth * c;
    } else {
        Eigen::VectorXd re = sp.synth * c.real();
        Eigen::VectorXd im = sp.synth * c.imag();
        flat.resize(re.size());
        for (Eigen::Index j = 0; j < re.size(); ++j) flat(j) = Scalar(re(j), im(j));
    }
    f.values = Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(
        flat.data(), sp.domain.axis1.num_points, sp.domain.axis2.num_points);
    return f;
}

// Closed-form evaluation of the same element at an arbitrary point.
template <typename Scalar>
Scalar evaluate_element(const QsisSpace& sp, const CoefficientArray<Scalar>& c, double u,
                        double v) {
    Scalar acc{};
    for (int i = 0; i < sp.r(); ++i) {
        const auto& g = sp.gens.gens[i];
        for (Eigen::Index pair = 0; pair < sp.num_pairs(); ++pair) {
            auto [s, t] = sp.active.pairs[pair];
            double du = detail::support_diff(sp.domain.axis1, u, sp.shifts.xs[s], g.lo);
            if (du < g.lo || du > g.hi) continue;
            double dv = detail::support_diff(sp.domain.axis2, v, sp.shifts.ys[t], g.lo);
            if (dv < g.lo || dv > g.hi) continue;
            acc += c(sp.col_index(i, pair)) * (g.profile(du) * g.profile(dv));
        }
    }
    return acc;
}

struct SpaceAnalysis {
    double a1 = 0.0;
    double a2 = 0.0;
    Eigen::Index d = 0;          // numerical rank of the weighted synthesis matrix
    double c_phi_tilde = 0.0;    // sup over K~ of the absolute shift sum
    bool a_exact = false;        // true iff the p=q=2 spectral path was used
};

namespace detail {
// Haar-weighted synthesis matrix restricted to the K~ nodes.
inline Eigen::MatrixXd weighted_synth_on(const QsisSpace& sp, const Region& region) {
    double w = std::sqrt(region.a1.axis.step * region.a2.axis.step);
    Eigen::MatrixXd m(region.a1.range.count * region.a2.range.count, sp.cols());
    Eigen::Index n1 = sp.domain.axis1.num_points;
    Eigen::Index row = 0;
    for (Eigen::Index j = 0; j < region.a2.range.count; ++j) {
        Eigen::Index gj = region.a2.node_index(j);
        for (Eigen::Index i = 0; i < region.a1.range.count; ++i, ++row)
            m.row(row) = w * sp.synth.row(region.a1.node_index(i) + n1 * gj);
    }
    return m;
}
} // namespace detail

// C~_Phi = max over K~ nodes of sum_i sum_{s,t} |phi_i(u - x_s, v - y_t)|;
// separable per generator since |phi_i| factors across the axes.
inline double c_phi_tilde(const QsisSpace& sp) {
    const auto& kt = sp.domain.Ktilde;
    double best = 0.0;
    std::vector<Eigen::VectorXd> sx(sp.r()), sy(sp.r());
    for (int i = 0; i < sp.r(); ++i) {
        const auto& g = sp.gens.gens[i];
        sx[i].setZero(kt.a1.range.count);
        sy[i].setZero(kt.a2.range.count);
        for (Eigen::Index n = 0; n < kt.a1.range.count; ++n) {
            double u = sp.domain.axis1.node(kt.a1.node_index(n));
            for (double x : sp.shifts.xs)
                sx[i](n) += std::abs(g.profile(detail::support_diff(sp.domain.axis1, u, x, g.lo)));
        }
        for (Eigen::Index n = 0; n < kt.a2.range.count; ++n) {
            double v = sp.domain.axis2.node(kt.a2.node_index(n));
            for (double y : sp.shifts.ys)
                sy[i](n) += std::abs(g.profile(detail::support_diff(sp.domain.axis2, v, y, g.lo)));
        }
    }
    for (Eigen::Index n = 0; n < kt.a1.range.count; ++n)
        for (Eigen::Index m = 0; m < kt.a2.range.count; ++m) {
            double s = 0.0;
            for (int i = 0; i < sp.r(); ++i) s += sx[i](n) * sy[i](m);
            best = std::max(best, s);
        }
    return best;
}

// Stability constants. For p = q = 2 the spectral path is used: d is the
// numerical rank of the Haar-weighted synthesis matrix on K~, a2 the largest
// per-generator block singular value (exact for the summed coefficient norm),
// a1 the smallest row-space singular value, divided by sqrt(r) for r > 1 so
// it is never optimistic under the summed norm. Other exponents use probe
// extrema over all coordinate vectors plus random unit coefficient vectors.
inline SpaceAnalysis analyze_space(const QsisSpace& sp, const MixedExponents& e,
                                   int probes = 64, std::uint64_t seed = 0) {
    SpaceAnalysis out;
    out.c_phi_tilde = c_phi_tilde(sp);
    Eigen::MatrixXd m = detail::weighted_synth_on(sp, sp.domain.Ktilde);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    if (!(smax > 0.0)) throw DegenerateSpaceError("synthesis operator has rank 0 on K~");
    Eigen::Index d = 0;
    while (d < sv.size() && sv(d) > 1e-10 * smax) ++d;
    out.d = d;
    if (e.p == 2.0 && e.q == 2.0) {
        out.a_exact = true;
        out.a1 = sv(d - 1);
        out.a2 = smax;
        if (sp.r() > 1) {
            out.a1 /= std::sqrt(static_cast<double>(sp.r()));
            double block_max = 0.0;
            for (int i = 0; i < sp.r(); ++i) {
                Eigen::BDCSVD<Eigen::MatrixXd> bs(
                    m.middleCols(i * sp.num_pairs(), sp.num_pairs()));
                block_max = std::max(block_max, bs.singularValues()(0));
            }
            out.a2 = block_max;
        }
        return out;
    }
    out.a_exact = false;
    double lo = kInf, hi = 0.0;
    auto probe = [&](const CoefficientArray<double>& c) {
        double cn = coefficient_norm(sp, c, e);
        if (!(cn > 0.0)) return;
        double fn = mixed_norm(synthesize(sp, c), sp.domain.Ktilde, e);
        double ratio = fn / cn;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    };
    for (Eigen::Index j = 0; j < sp.cols(); ++j) {
        CoefficientArray<double> c = CoefficientArray<double>::Zero(sp.cols());
        c(j) = 1.0;
        probe(c);
    }
    Rng rng = Rng::substream(seed, 0xA11);
    for (int k = 0; k < probes; ++k) {
        CoefficientArray<double> c(sp.cols());
        for (Eigen::Index j = 0; j < sp.cols(); ++j) c(j) = rng.gaussian();
        probe(c);
    }
    out.a1 = lo;
    out.a2 = hi;
    return out;
}

// Gaussian random element rescaled to ||f||_{L^{p,q}(K~)} = 1.
template <typename Scalar = double>
std::pair<GridFunction<Scalar>, CoefficientArray<Scalar>> random_unit_element(
    const QsisSpace& sp, const MixedExponents& e, std::uint64_t seed) {
    Rng rng = Rng::substream(seed, 0xF00D);
    for (int attempt = 0; attempt < 8; ++attempt) {
        CoefficientArray<Scalar> c(sp.cols());
        for (Eigen::Index j = 0; j < sp.cols(); ++j) {
            if constexpr (std::is_same_v<Scalar, double>) {
                c(j) = rng.gaussian();
            } else {
                double re = rng.gaussian();
                c(j) = Scalar(re, rng.gaussian());
            }
        }
        GridFunction<Scalar> f = synthesize(sp, c);
        double n = mixed_norm(f, sp.domain.Ktilde, e);
        if (n > 1e-154) {
            c /= n;
            f.values /= n;
            return {std::move(f), std::move(c)};
        }
    }
    throw DegenerateSpaceError("random element repeatedly synthesized to zero");
}

struct MembershipFlags {
    bool in_theta_alpha = false; // ||f*w||_{L^{p,q}(K)} >= theta and ||f||_{K~} <= alpha
    bool in_omega_mu = false;    // mu ||w||_1 ||f||_{K~} <= ||f*w||_{L^1(K)}
    double conv_pq = 0.0;
    double conv_l1 = 0.0;
    double f_norm = 0.0;
};

template <typename Scalar, typename KS>
MembershipFlags classify_membership(const QsisSpace& sp, const GridFunction<Scalar>& f,
                                    const AveragingKernel<KS>& kernel, const MixedExponents& e,
                                    double theta, double alpha, double mu) {
    if (!(mu > 0.0) || mu > 1.0) throw InvalidParameter("mu must lie in (0, 1]");
    auto conv = grid_convolve(f, kernel, sp.domain.K);
    GridFunction<decltype(Scalar{} * KS{})> cf(f.axis1, f.axis2);
    const auto& K = sp.domain.K;
    for (Eigen::Index i = 0; i < K.a1.range.count; ++i)
        for (Eigen::Index j = 0; j < K.a2.range.count; ++j)
            cf.values(K.a1.node_index(i), K.a2.node_index(j)) = conv(i, j);
    MembershipFlags flags;
    flags.conv_pq = mixed_norm(cf, K, e);
    flags.conv_l1 = mixed_norm(cf, K, MixedExponents{1.0, 1.0});
    flags.f_norm = mixed_norm(f, sp.domain.Ktilde, e);
    flags.in_theta_alpha = flags.conv_pq >= theta && flags.f_norm <= alpha;
    double lhs = mu * kernel.l1_norm * flags.f_norm;
    flags.in_omega_mu = lhs <= flags.conv_l1 + 1e-12 * std::max(1.0, flags.conv_l1);
    return flags;
}

} // namespace qsis
