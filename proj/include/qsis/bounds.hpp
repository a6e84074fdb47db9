// Closed-form evaluation of every explicit constant, threshold, and
// probability bound of the concentration lemma and the two sampling
// theorems. Everything that can overflow double precision (the covering
// prefactors grow like exp(d log ...)) is evaluated in log space.
#pragma once

#include <cmath>
#include <limits>

#include "qsis/errors.hpp"

namespace qsis {

inline constexpr double kProbFloor = -1e300; // saturation for reported lower bounds

// Symbols shared by the probability bounds. All produced upstream: d,
// c_phi_tilde, a1 by the space analysis, omega_l1 by the kernel, mu1/mu2 by
// the domain, c_rho_1/c_rho_2 by the density.
struct BoundInputs {
    long d = 1;
    double c_phi_tilde = 1.0;
    double a1 = 1.0;
    double omega_l1 = 1.0;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double c_rho_1 = 1.0;
    double c_rho_2 = 1.0;
    double p = 2.0;
    double q = 2.0;

    void validate() const {
        if (d < 1) throw InvalidParameter("bound inputs: d must be a positive integer");
        for (double x : {c_phi_tilde, a1, omega_l1, mu1, mu2, c_rho_1, c_rho_2})
            if (!(x > 0.0)) throw InvalidParameter("bound inputs must be strictly positive");
        if (!(p > 1.0) || !(q > 1.0) || std::isinf(p) || std::isinf(q))
            throw InvalidParameter("bound inputs: the theorems need 1 < p,q < inf");
    }
};

// Covering-number bound exp(d ln(4 C / (eta a1))), clamped to the trivial
// cover 1 when the log argument drops below one.
inline double covering_bound(long d, double c_phi_tilde, double a1, double eta) {
    if (!(eta > 0.0)) throw InvalidParameter("covering_bound: eta must be positive");
    double arg = 4.0 * c_phi_tilde / (eta * a1);
    if (arg <= 1.0) return 1.0;
    return std::exp(static_cast<double>(d) * std::log(arg));
}

// Threshold on the concentration parameter p_frak.
inline double p_min(long n, long m, long d, double omega_l1) {
    if (n < 1 || m < 1) throw InvalidParameter("p_min: n, m must be >= 1");
    double n1 = 2.0 * std::sqrt(2.0) * std::log(2.0) * static_cast<double>(d);
    double nm = static_cast<double>(n) * static_cast<double>(m);
    return 54.0 * n1 * (1.0 + std::sqrt(1.0 + 3.0 * nm / n1)) * omega_l1;
}

namespace detail {
inline double log_a1_const(long d, double c_phi_tilde, double a1) {
    return std::log(2.0) + static_cast<double>(d) * std::log(8.0 * c_phi_tilde / a1);
}
inline double log_a2_const(long d, double c_phi_tilde, double a1) {
    double l2 = std::log(2.0);
    return std::log(4.0 / (3.0 * static_cast<double>(d) * l2 * l2)) +
           2.0 * static_cast<double>(d) * std::log(4.0 * c_phi_tilde / a1);
}
inline double safe_exp(double x) {
    if (x > 709.0) return std::numeric_limits<double>::infinity();
    return std::exp(x);
}
} // namespace detail

struct Lemma31Bound {
    double term1 = 0.0;
    double term2 = 0.0;
    double total = 0.0;
    double log_term1 = 0.0; // always finite
    double log_term2 = 0.0;
    bool hypothesis_met = false; // p_frak > p_min(n, m, d, ||w||_1)
};

// Probability bound of the concentration lemma at parameter p_frak. The
// formula is evaluated even when the hypothesis fails; the flag records it.
inline Lemma31Bound lemma31_bound(const BoundInputs& in, long n, long m, double p_frak) {
    in.validate();
    double C = in.c_phi_tilde, a1 = in.a1, w = in.omega_l1;
    double nm = static_cast<double>(n) * static_cast<double>(m);
    Lemma31Bound out;
    out.hypothesis_met = p_frak > p_min(n, m, in.d, w);
    double e1 = -3.0 * a1 * a1 * p_frak * p_frak /
                (4.0 * C * w * (6.0 * nm * C * w + p_frak * a1));
    double e2 = -p_frak * p_frak /
                (72.0 * std::sqrt(2.0) * w * (81.0 * nm * w + p_frak));
    out.log_term1 = detail::log_a1_const(in.d, C, a1) + e1;
    out.log_term2 = detail::log_a2_const(in.d, C, a1) + e2;
    out.term1 = detail::safe_exp(out.log_term1);
    out.term2 = detail::safe_exp(out.log_term2);
    out.total = out.term1 + out.term2;
    return out;
}

struct Thm32Report {
    double zeta = 0.0;
    double gamma = 0.0;
    long n = 0;
    long m = 0;
    double a_tilde = 0.0;      // lower sampling constant
    double b_tilde = 0.0;      // upper sampling constant
    double beta_prime = 0.0;
    double beta_dprime = 0.0;
    double nm_min = 0.0;       // sample-count threshold
    double p_frak = 0.0;       // nm * N2, the event threshold the proof uses
    double prob_lower = 0.0;   // 1 - A1 e^{-nm b'} - A2 e^{-nm b''}, unclamped
    bool vacuous = false;      // prob_lower <= 0
    double A1 = 0.0;           // covering prefactors (may overflow to inf;
    double A2 = 0.0;           //  the log fields below stay finite)
    double log_A1 = 0.0;
    double log_A2 = 0.0;
};

// All constants of the first sampling theorem at zeta = theta/alpha.
inline Thm32Report thm32_constants(const BoundInputs& in, double zeta, double gamma, long n,
                                   long m) {
    in.validate();
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw InvalidParameter("thm32_constants: gamma must lie in (0, 1)");
    if (!(zeta > 0.0)) throw InvalidParameter("thm32_constants: zeta must be positive");
    double C = in.c_phi_tilde, a1 = in.a1, w = in.omega_l1;
    double p = in.p, q = in.q, pq = p * q;
    double nm = static_cast<double>(n) * static_cast<double>(m);
    // Grouped quantities: E = mu1^{1-q} mu2^{1-p}; N2 is the proof's choice
    // of p_frak per sample, so p_frak = nm * N2.
    double logE = (1.0 - q) * std::log(in.mu1) + (1.0 - p) * std::log(in.mu2);
    double logT = std::log(C * w / a1);
    double logN2 = std::log(gamma) + std::log(in.c_rho_1) + logE + (1.0 - pq) * logT +
                   pq * std::log(zeta);
    double N2 = std::exp(logN2);
    Thm32Report r;
    r.zeta = zeta;
    r.gamma = gamma;
    r.n = n;
    r.m = m;
    r.p_frak = nm * N2;
    r.a_tilde = (1.0 - gamma) / gamma * N2 * std::pow(static_cast<double>(n), 1.0 / p) *
                std::pow(static_cast<double>(m), 1.0 / q);
    r.b_tilde = in.c_rho_2 * std::pow(in.mu1, (p - 1.0) / p) *
                    std::pow(in.mu2, (q - 1.0) / q) * w * nm +
                N2 * nm;
    // beta' = (3/4) E^2 g^2 / (6 + E g), beta'' = E^2 g^2 R^2 /
    // (72 sqrt2 (81 + E g R)) with g = gamma c_rho_1 (a1 zeta / (C w))^{pq},
    // R = C/a1; algebraically equal to the displayed forms.
    double E = std::exp(logE);
    double g = gamma * in.c_rho_1 * std::exp(pq * (std::log(zeta) - logT));
    double R = C / a1;
    r.beta_prime = 0.75 * E * E * g * g / (6.0 + E * g);
    r.beta_dprime = E * E * g * g * R * R /
                    (72.0 * std::sqrt(2.0) * (81.0 + E * g * R));
    double N1 = 2.0 * std::sqrt(2.0) * std::log(2.0) * static_cast<double>(in.d);
    r.nm_min = 54.0 * N1 * w * (162.0 * w + 2.0 * N2) / (N2 * N2);
    r.log_A1 = detail::log_a1_const(in.d, C, a1);
    r.log_A2 = detail::log_a2_const(in.d, C, a1);
    r.A1 = detail::safe_exp(r.log_A1);
    r.A2 = detail::safe_exp(r.log_A2);
    double t1 = detail::safe_exp(r.log_A1 - nm * r.beta_prime);
    double t2 = detail::safe_exp(r.log_A2 - nm * r.beta_dprime);
    r.prob_lower = std::max(1.0 - t1 - t2, kProbFloor);
    r.vacuous = !(r.prob_lower > 0.0);
    return r;
}

struct Thm33Report {
    double mu = 0.0;
    double eta = 0.0;
    long n = 0;
    long m = 0;
    double lower_factor = 0.0; // mu c_rho_1 - eta
    double upper_factor = 0.0; // c_rho_2 mu1^{(p-1)/p} mu2^{(q-1)/q} + eta
    double nm_min = 0.0;
    double exponent1 = 0.0;    // per-sample decay rates of the two tail terms
    double exponent2 = 0.0;
    double prob_lower = 0.0;
    bool vacuous = false;
    double log_A1 = 0.0;
    double log_A2 = 0.0;
};

// All constants of the second sampling theorem.
inline Thm33Report thm33_constants(const BoundInputs& in, double mu, double eta, long n,
                                   long m) {
    in.validate();
    if (!(mu > 0.0) || mu > 1.0) throw InvalidParameter("thm33_constants: mu must lie in (0, 1]");
    if (!(eta > 0.0) || !(eta < mu * in.c_rho_1))
        throw InvalidParameter("thm33_constants: need 0 < eta < mu * c_rho_1");
    double C = in.c_phi_tilde, a1 = in.a1;
    double nm = static_cast<double>(n) * static_cast<double>(m);
    Thm33Report r;
    r.mu = mu;
    r.eta = eta;
    r.n = n;
    r.m = m;
    r.lower_factor = mu * in.c_rho_1 - eta;
    r.upper_factor = in.c_rho_2 * std::pow(in.mu1, (in.p - 1.0) / in.p) *
                         std::pow(in.mu2, (in.q - 1.0) / in.q) +
                     eta;
    r.nm_min = 108.0 * std::sqrt(2.0) * std::log(2.0) * static_cast<double>(in.d) / eta *
               (2.0 + 162.0 / eta);
    r.exponent1 = 3.0 * a1 * a1 * eta * eta / (4.0 * C * (6.0 * C + eta * a1));
    r.exponent2 = eta * eta / (72.0 * std::sqrt(2.0) * (81.0 + eta));
    r.log_A1 = detail::log_a1_const(in.d, C, a1);
    r.log_A2 = detail::log_a2_const(in.d, C, a1);
    double t1 = detail::safe_exp(r.log_A1 - nm * r.exponent1);
    double t2 = detail::safe_exp(r.log_A2 - nm * r.exponent2);
    r.prob_lower = std::max(1.0 - t1 - t2, kProbFloor);
    r.vacuous = !(r.prob_lower > 0.0);
    return r;
}

} // namespace qsis
