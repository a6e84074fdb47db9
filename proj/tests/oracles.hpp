// Test-only reference evaluations of the closed-form constants, written
// independently of the library implementation (literal transcription with
// plain pow/exp instead of the grouped log-space route used in
// qsis/bounds.hpp). These stay frozen; the library must match them.
#pragma once

#include <cmath>

namespace oracle {

// Frozen reference values (high-precision evaluation of the closed forms).
inline constexpr double kPminGolden = 274.2680112843659707;   // n=m=1, d=1, w=1
inline constexpr double kThm33NmMinGolden = 17362.332237114908; // eta=1, d=1
inline constexpr double kCoveringGolden = 64.0;               // d=2, C=2, a1=1, eta=1

inline double covering_bound(double d, double c_phi, double a1, double eta) {
    double arg = 4.0 * c_phi / (eta * a1);
    if (arg <= 1.0) return 1.0;
    return std::exp(d * std::log(arg));
}

inline double p_min(double n, double m, double d, double w) {
    double s2 = std::sqrt(2.0), l2 = std::log(2.0);
    return 108.0 * s2 * l2 * d *
           (1.0 + std::sqrt(1.0 + 3.0 * n * m / (2.0 * s2 * l2 * d))) * w;
}

struct Lemma31 {
    double term1, term2, total;
};

inline Lemma31 lemma31_bound(double d, double c_phi, double a1, double w,
                             double n, double m, double p_frak) {
    double A1 = 2.0 * std::exp(d * std::log(8.0 * c_phi / a1));
    double A2 = 4.0 / (3.0 * d * std::log(2.0) * std::log(2.0)) *
                std::pow(4.0 * c_phi / a1, 2.0 * d);
    double e1 = -3.0 * a1 * a1 * p_frak * p_frak /
                (4.0 * c_phi * w * (6.0 * n * m * c_phi * w + p_frak * a1));
    double e2 = -p_frak * p_frak /
                (72.0 * std::sqrt(2.0) * w * (81.0 * n * m * w + p_frak));
    Lemma31 r;
    r.term1 = A1 * std::exp(e1);
    r.term2 = A2 * std::exp(e2);
    r.total = r.term1 + r.term2;
    return r;
}

struct Thm32 {
    double a_tilde, b_tilde, beta_prime, beta_dprime, nm_min, prob_lower;
};

// Literal transcription of the theorem display, with zeta = theta/alpha
// substituted where the sample-count bound is stated via theta and alpha.
inline Thm32 thm32_constants(double d, double c_phi, double a1, double w,
                             double mu1, double mu2, double cr1, double cr2,
                             double p, double q, double zeta, double gamma,
                             double n, double m) {
    double T = c_phi * w / a1; // recurring ratio
    double pq = p * q;
    Thm32 r;
    r.a_tilde = (1.0 - gamma) * cr1 * std::pow(mu1, 1.0 - q) *
                std::pow(mu2, 1.0 - p) * std::pow(T, 1.0 - pq) *
                std::pow(zeta, pq) * std::pow(n, 1.0 / p) * std::pow(m, 1.0 / q);
    r.b_tilde = cr2 * std::pow(mu1, (p - 1.0) / p) * std::pow(mu2, (q - 1.0) / q) * w * n * m +
                gamma * cr1 * std::pow(mu1, 1.0 - q) * std::pow(mu2, 1.0 - p) *
                    std::pow(T, 1.0 - pq) * std::pow(zeta, pq) * n * m;
    double grat = std::pow(a1 * zeta / (c_phi * w), pq); // (a1 zeta / (C w))^{pq}
    double num_p = std::pow(mu1, 1.0 - q) * std::pow(mu2, 1.0 - p) *
                   std::pow(std::sqrt(3.0) / 2.0 * gamma * cr1 * grat, 2.0);
    double den_p = 6.0 * std::pow(mu1, q - 1.0) * std::pow(mu2, p - 1.0) + gamma * cr1 * grat;
    r.beta_prime = num_p / den_p;
    double R = c_phi / a1;
    double num_pp = std::pow(mu1, 1.0 - q) * std::pow(mu2, 1.0 - p) *
                    std::pow(gamma * cr1 * grat * R, 2.0);
    double den_pp = 72.0 * std::sqrt(2.0) *
                    (81.0 * std::pow(mu1, q - 1.0) * std::pow(mu2, p - 1.0) +
                     gamma * cr1 * grat * R);
    r.beta_dprime = num_pp / den_pp;
    // Sample-count threshold as displayed: numerator alpha^{2pq}, denominator
    // (gamma cr1 mu1^{1-q} mu2^{1-p} T^{1-pq} theta^{pq})^2 with theta = zeta,
    // alpha = 1 (the display depends on theta, alpha through zeta only).
    double N2 = gamma * cr1 * std::pow(mu1, 1.0 - q) * std::pow(mu2, 1.0 - p) *
                std::pow(T, 1.0 - pq) * std::pow(zeta, pq);
    r.nm_min = 108.0 * std::sqrt(2.0) * std::log(2.0) * d * w / (N2 * N2) *
               (162.0 * w + 2.0 * N2);
    double A1 = 2.0 * std::exp(d * std::log(8.0 * c_phi / a1));
    double A2 = 4.0 / (3.0 * d * std::log(2.0) * std::log(2.0)) *
                std::pow(4.0 * c_phi / a1, 2.0 * d);
    r.prob_lower = 1.0 - A1 * std::exp(-n * m * r.beta_prime) -
                   A2 * std::exp(-n * m * r.beta_dprime);
    return r;
}

struct Thm33 {
    double lower_factor, upper_factor, nm_min, prob_lower;
};

inline Thm33 thm33_constants(double d, double c_phi, double a1,
                             double mu1, double mu2, double cr1, double cr2,
                             double p, double q, double mu, double eta,
                             double n, double m) {
    Thm33 r;
    r.lower_factor = mu * cr1 - eta;
    r.upper_factor = cr2 * std::pow(mu1, (p - 1.0) / p) * std::pow(mu2, (q - 1.0) / q) + eta;
    r.nm_min = 108.0 * std::sqrt(2.0) * std::log(2.0) * d / eta * (2.0 + 162.0 / eta);
    double A1 = 2.0 * std::exp(d * std::log(8.0 * c_phi / a1));
    double A2 = 4.0 / (3.0 * d * std::log(2.0) * std::log(2.0)) *
                std::pow(4.0 * c_phi / a1, 2.0 * d);
    double e1 = -n * m * 3.0 * a1 * a1 * eta * eta /
                (4.0 * c_phi * (6.0 * c_phi + eta * a1));
    double e2 = -n * m * eta * eta / (72.0 * std::sqrt(2.0) * (81.0 + eta));
    r.prob_lower = 1.0 - A1 * std::exp(e1) - A2 * std::exp(e2);
    return r;
}

} // namespace oracle
