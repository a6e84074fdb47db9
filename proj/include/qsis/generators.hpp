// Tensor-product cardinal B-spline generators with exactly recorded
// rectangular supports. Variants beyond the first are centered dilations of
// the base spline, so the supports are distinct but nested and the active
// shift set stays a full (s, t) rectangle.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "qsis/domain.hpp"

namespace qsis {

// Cardinal B-spline B_order on [0, order+1].
inline double bspline(int order, double x) {
    switch (order) {
        case 0:
            return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
        case 1:
            if (x < 0.0 || x > 2.0) return 0.0;
            return x <= 1.0 ? x : 2.0 - x;
        case 2:
            if (x < 0.0 || x > 3.0) return 0.0;
            if (x <= 1.0) return 0.5 * x * x;
            if (x <= 2.0) return 0.5 * (-2.0 * x * x + 6.0 * x - 3.0);
            return 0.5 * (3.0 - x) * (3.0 - x);
        case 3:
            if (x < 0.0 || x > 4.0) return 0.0;
            if (x <= 1.0) return x * x * x / 6.0;
            if (x <= 2.0) return (-3.0 * x * x * x + 12.0 * x * x - 12.0 * x + 4.0) / 6.0;
            if (x <= 3.0) return (3.0 * x * x * x - 24.0 * x * x + 60.0 * x - 44.0) / 6.0;
            return (4.0 - x) * (4.0 - x) * (4.0 - x) / 6.0;
        default:
            throw InvalidParameter("unsupported B-spline order (expected 0..3)");
    }
}

// One tensor-product generator phi(u, v) = profile(u) * profile(v).
struct Generator {
    int order = 1;
    double lo = 0.0;    // per-axis support [lo, hi]
    double hi = 2.0;
    double inv_len = 0.5; // (order+1) / (hi - lo)

    double profile(double x) const {
        if (x < lo || x > hi) return 0.0;
        return bspline(order, (x - lo) * inv_len);
    }
    double operator()(double u, double v) const { return profile(u) * profile(v); }
};

struct GeneratorSet {
    int r = 1;
    std::vector<Generator> gens;
    double omega_lo = 0.0; // union support rectangle (per axis; square here)
    double omega_hi = 2.0;
};

// r tensor B-splines of the given order. Variant k is the base spline dilated
// by 1 - k/8 about the support center, so supports are distinct and nested.
inline GeneratorSet make_bspline_generators(int order, double scale, int r) {
    if (order < 0 || order > 3) throw InvalidParameter("unsupported B-spline order (expected 0..3)");
    if (!(scale > 0.0)) throw InvalidParameter("generator scale must be positive");
    if (r < 1 || r > 7) throw InvalidParameter("generator count must be in 1..7");
    GeneratorSet set;
    set.r = r;
    double len = (order + 1.0) * scale;
    for (int k = 0; k < r; ++k) {
        double lambda = 1.0 - static_cast<double>(k) / 8.0;
        Generator g;
        g.order = order;
        g.lo = 0.5 * len * (1.0 - lambda);
        g.hi = g.lo + len * lambda;
        g.inv_len = (order + 1.0) / (g.hi - g.lo);
        set.gens.push_back(g);
    }
    set.omega_lo = set.gens.front().lo;
    set.omega_hi = set.gens.front().hi;
    return set;
}

} // namespace qsis
