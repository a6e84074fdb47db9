// Assembly of the sample matrix M with entries (phi_i * omega)(u_j - x_s,
// v_k - y_t), the dual system M~ = conj(M) (M^T conj(M))^{-1} and its dual
// functions h_{j,k}, and least-squares recovery of coefficients from average
// samples.
#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "qsis/averaging.hpp"
#include "qsis/sampling.hpp"
#include "qsis/space.hpp"

namespace qsis {

template <typename Scalar = double>
struct SampleMatrix {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M; // (n*m) x (r*s0*t0)
    Eigen::Index n = 0; // rows are (j, k) row-major: row = j*m + k
    Eigen::Index m = 0;
    int r = 0;
    int s0 = 0;
    int t0 = 0;
};

// entry((j,k), (i,s,t)) = (phi_i * omega)(u_jk - x_s, v_jk - y_t), computed
// with the same kernel quadrature as convolve. Columns are generator-major,
// then shift-lexicographic, matching the space's coefficient layout.
template <typename KS>
SampleMatrix<KS> assemble_matrix(const QsisSpace& sp, const AveragingKernel<KS>& kernel,
                                 const SampleSet& samples) {
    SampleMatrix<KS> out;
    out.n = samples.n;
    out.m = samples.m;
    out.r = sp.r();
    out.s0 = sp.s0();
    out.t0 = sp.t0();
    Eigen::Index rows = samples.n * samples.m;
    out.M.setZero(rows, sp.cols());
    double h = kernel.w1.axis.step * kernel.w2.axis.step;
    std::vector<double> wu(kernel.w1.range.count), wv(kernel.w2.range.count);
    for (Eigen::Index a = 0; a < kernel.w1.range.count; ++a) wu[a] = kernel.w1.node(a);
    for (Eigen::Index b = 0; b < kernel.w2.range.count; ++b) wv[b] = kernel.w2.node(b);
    for (Eigen::Index j = 0; j < samples.n; ++j)
        for (Eigen::Index k = 0; k < samples.m; ++k) {
            Eigen::Index row = j * samples.m + k;
            double u = samples.u(j, k), v = samples.v(j, k);
            for (int i = 0; i < sp.r(); ++i) {
                const auto& g = sp.gens.gens[i];
                for (Eigen::Index pair = 0; pair < sp.num_pairs(); ++pair) {
                    auto [s, t] = sp.active.pairs[pair];
                    double xs = sp.shifts.xs[s], yt = sp.shifts.ys[t];
                    KS acc{};
                    for (Eigen::Index a = 0; a < kernel.w1.range.count; ++a) {
                        double du =
                            detail::support_diff(sp.domain.axis1, u - wu[a], xs, g.lo);
                        if (du < g.lo || du > g.hi) continue;
                        double pu = g.profile(du);
                        for (Eigen::Index b = 0; b < kernel.w2.range.count; ++b) {
                            double dv = detail::support_diff(sp.domain.axis2, v - wv[b], yt,
                                                             g.lo);
                            if (dv < g.lo || dv > g.hi) continue;
                            acc += pu * g.profile(dv) * kernel.values(a, b);
                        }
                    }
                    out.M(row, sp.col_index(i, pair)) = acc * h;
                }
            }
        }
    return out;
}

struct BetaEstimate {
    double beta = 0.0;
    bool hypothesis_failure = false; // no positive lower constant on this instance
};

namespace detail {
// Averaged synthesis matrix on the K nodes: column (i,s,t) holds
// (phi_i * omega)(z - x_s, . - y_t) over z in the K grid, Haar-weighted when
// `weighted`. Evaluated by sampling the shifted generator on the grid and
// convolving on-grid (identical quadrature to convolve()).
template <typename KS>
Eigen::Matrix<KS, Eigen::Dynamic, Eigen::Dynamic> averaged_synth_on_k(
    const QsisSpace& sp, const AveragingKernel<KS>& kernel, bool weighted) {
    const Region& K = sp.domain.K;
    Eigen::Index rows = K.a1.range.count * K.a2.range.count;
    Eigen::Matrix<KS, Eigen::Dynamic, Eigen::Dynamic> m(rows, sp.cols());
    double w = weighted ? std::sqrt(K.a1.axis.step * K.a2.axis.step) : 1.0;
    for (int i = 0; i < sp.r(); ++i) {
        const auto& g = sp.gens.gens[i];
        for (Eigen::Index pair = 0; pair < sp.num_pairs(); ++pair) {
            auto [s, t] = sp.active.pairs[pair];
            auto shifted = sample_on_grid(sp.domain.axis1, sp.domain.axis2,
                                          [&](double u, double v) {
                                              return sp.shifted_gen(i, s, t, u, v);
                                          });
            auto conv = grid_convolve(shifted, kernel, K);
            Eigen::Index row = 0;
            for (Eigen::Index jj = 0; jj < K.a2.range.count; ++jj)
                for (Eigen::Index ii = 0; ii < K.a1.range.count; ++ii, ++row)
                    m(row, sp.col_index(i, pair)) = w * conv(ii, jj);
        }
    }
    return m;
}
} // namespace detail

// Lower bound on ||sum c (Phi*omega)(.-x_s,.-y_t)||_{L^{p,q}(K)} / ||c||.
// p = q = 2 uses the smallest singular value of the Haar-weighted averaged
// synthesis matrix (over sqrt(r) for r > 1, as in analyze_space); other
// exponents take the minimum over coordinate and random probes.
template <typename KS>
BetaEstimate beta_estimate(const QsisSpace& sp, const AveragingKernel<KS>& kernel,
                           const MixedExponents& e, int probes, std::uint64_t seed) {
    if (probes < sp.cols()) probes = static_cast<int>(sp.cols());
    auto m = detail::averaged_synth_on_k(sp, kernel, true);
    BetaEstimate out;
    if (e.p == 2.0 && e.q == 2.0) {
        Eigen::BDCSVD<decltype(m)> svd(m);
        double smin = svd.singularValues()(svd.singularValues().size() - 1);
        out.beta = sp.r() > 1 ? smin / std::sqrt(static_cast<double>(sp.r())) : smin;
        double smax = svd.singularValues()(0);
        out.hypothesis_failure = !(smin > 1e-10 * std::max(smax, 1e-300));
        return out;
    }
    auto mu = detail::averaged_synth_on_k(sp, kernel, false);
    const Region& K = sp.domain.K;
    auto probe_norm = [&](const CoefficientArray<double>& c) {
        Eigen::Vector<KS, Eigen::Dynamic> vals = mu * c.template cast<KS>();
        GridFunction<KS> g(sp.domain.axis1, sp.domain.axis2);
        Eigen::Index row = 0;
        for (Eigen::Index jj = 0; jj < K.a2.range.count; ++jj)
            for (Eigen::Index ii = 0; ii < K.a1.range.count; ++ii, ++row)
                g.values(K.a1.node_index(ii), K.a2.node_index(jj)) = vals(row);
        return mixed_norm(g, K, e);
    };
    double lo = kInf;
    for (Eigen::Index j = 0; j < sp.cols(); ++j) {
        CoefficientArray<double> c = CoefficientArray<double>::Zero(sp.cols());
        c(j) = 1.0;
        lo = std::min(lo, probe_norm(c) / coefficient_norm(sp, c, e));
    }
    Rng rng = Rng::substream(seed, 0xBE7A);
    int extra = probes - static_cast<int>(sp.cols());
    for (int k = 0; k < extra; ++k) {
        CoefficientArray<double> c(sp.cols());
        for (Eigen::Index j = 0; j < sp.cols(); ++j) c(j) = rng.gaussian();
        double cn = coefficient_norm(sp, c, e);
        if (cn > 0.0) lo = std::min(lo, probe_norm(c) / cn);
    }
    out.beta = lo;
    out.hypothesis_failure = !(lo > 1e-10);
    return out;
}

template <typename Scalar = double>
struct DualSystem {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Mtilde; // conj(M)(M^T conj(M))^{-1}
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    double smin = 0.0;
    double smax = 0.0;
    double cond2_gram = 0.0;     // (smax/smin)^2, conditioning of the Gram solve
    double inv_gram_norm = 0.0;  // 1/smin^2 = ||(M* M)^{-1}||
};

// Dual system via a rank-revealing route: singular values gate injectivity
// (relative cutoff 1e-10); the pseudo-inverse application uses the normal
// equations below condition 1e6 and a column-pivoted QR above it.
template <typename Scalar>
DualSystem<Scalar> solve_dual(const SampleMatrix<Scalar>& sm) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Mat& M = sm.M;
    if (M.rows() < M.cols())
        throw NotInjectiveError("sample matrix has fewer rows than columns", 0.0, 0.0);
    Eigen::BDCSVD<Mat> svd(M);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 1e-10 * smax))
        throw NotInjectiveError(
            "sample matrix is rank deficient (nm too small or unlucky draw)", smin, smax);
    DualSystem<Scalar> dual;
    dual.n = sm.n;
    dual.m = sm.m;
    dual.smin = smin;
    dual.smax = smax;
    dual.cond2_gram = (smax / smin) * (smax / smin);
    dual.inv_gram_norm = 1.0 / (smin * smin);
    // pinv = (M* M)^{-1} M*; Mtilde = pinv^T.
    Mat pinv;
    if (smax / smin <= 1e6) {
        Mat gram = M.adjoint() * M;
        pinv = gram.template selfadjointView<Eigen::Lower>().llt().solve(M.adjoint());
    } else {
        Eigen::ColPivHouseholderQR<Mat> qr(M);
        pinv = qr.solve(Mat::Identity(M.rows(), M.rows()));
    }
    dual.Mtilde = pinv.transpose();
    return dual;
}

// h_{j,k}(u, v) = sum_{i,s,t} (M~_{jk}(s,t))_i phi_i(u - x_s, v - y_t).
template <typename Scalar>
Scalar dual_function_value(const QsisSpace& sp, const DualSystem<Scalar>& dual,
                           Eigen::Index j, Eigen::Index k, double u, double v) {
    CoefficientArray<Scalar> row = dual.Mtilde.row(j * dual.m + k).transpose();
    return evaluate_element(sp, row, u, v);
}

struct ErrorPair {
    double rel_pq = 0.0;
    double rel_inf = 0.0;
};

// Relative errors ||f - f_hat|| / ||f||, with 0/0 reported as 0.
template <typename Scalar>
ErrorPair reconstruction_error(const GridFunction<Scalar>& f, const GridFunction<Scalar>& f_hat,
                               const Region& region, const MixedExponents& e) {
    GridFunction<Scalar> diff(f.axis1, f.axis2);
    diff.values = f.values - f_hat.values;
    MixedExponents inf_exp{kInf, kInf};
    double den_pq = mixed_norm(f, region, e);
    double den_inf = mixed_norm(f, region, inf_exp);
    double num_pq = mixed_norm(diff, region, e);
    double num_inf = mixed_norm(diff, region, inf_exp);
    ErrorPair out;
    out.rel_pq = den_pq > 0.0 ? num_pq / den_pq : (num_pq > 0.0 ? kInf : 0.0);
    out.rel_inf = den_inf > 0.0 ? num_inf / den_inf : (num_inf > 0.0 ? kInf : 0.0);
    return out;
}

template <typename Scalar = double>
struct ReconstructionReport {
    CoefficientArray<Scalar> c_hat;
    GridFunction<Scalar> f_hat;
    double cond2_gram = 0.0;
    // Populated when the true element is supplied:
    std::optional<double> rel_coeff;
    std::optional<double> rel_pq;
    std::optional<double> rel_inf;
};

// c_hat = M~^T S, f_hat = synthesize(c_hat).
template <typename Scalar>
ReconstructionReport<Scalar> reconstruct(const Eigen::Vector<Scalar, Eigen::Dynamic>& S,
                                         const DualSystem<Scalar>& dual, const QsisSpace& sp,
                                         const MixedExponents& e,
                                         const GridFunction<Scalar>* f_true = nullptr,
                                         const CoefficientArray<Scalar>* c_true = nullptr) {
    if (S.size() != dual.Mtilde.rows())
        throw InvalidParameter("sample vector does not match the dual system layout");
    if (dual.Mtilde.cols() != sp.cols())
        throw InvalidParameter("dual system does not match the space layout");
    ReconstructionReport<Scalar> rep;
    rep.c_hat = dual.Mtilde.transpose() * S;
    rep.f_hat = synthesize(sp, rep.c_hat);
    rep.cond2_gram = dual.cond2_gram;
    if (c_true) {
        CoefficientArray<Scalar> dc = rep.c_hat - *c_true;
        double den = coefficient_norm(sp, *c_true, e);
        double num = coefficient_norm(sp, dc, e);
        rep.rel_coeff = den > 0.0 ? num / den : (num > 0.0 ? kInf : 0.0);
    }
    if (f_true) {
        ErrorPair err = reconstruction_error(*f_true, rep.f_hat, sp.domain.Ktilde, e);
        rep.rel_pq = err.rel_pq;
        rep.rel_inf = err.rel_inf;
    }
    return rep;
}

} // namespace qsis
