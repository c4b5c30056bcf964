#pragma once

// Closed-form analysis of the full factorial 2^d design with coordinates
// +/- b on the unit-sphere target: distortions for s in {2,4}, the
// covering radius for s = infinity, and the optimal half-widths. None of
// the 2^d points are ever materialised; everything reduces to moments of
// one or two coordinates of a uniform point on the sphere.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sphq/common.hpp"
#include "sphq/special.hpp"

namespace sphq {

struct FactorialDesign {
    int d;    // dimension; design size is 2^d implicitly
    double b; // half-width: points sit on the sphere of radius sqrt(d) b
};

struct FactorialOptimum {
    double b_star;
    double value; // distortion for s in {2,4}; covering radius for s = inf
};

namespace detail {

// E{V1} for V uniform on the positive orthant of the unit sphere.
inline double factorial_mean_v1(int d) {
    return std::exp(ln_gamma(0.5 * d) - ln_gamma(0.5 * (d + 1))) / std::sqrt(pi);
}

// E{(sum_i V_i)^2} = 1 + d(d-1) E{V1 V2} with E{V1 V2} = 2/(pi d).
inline double factorial_sum_sq(int d) { return 1.0 + 2.0 * (d - 1) / pi; }

inline void check_dim(int d) {
    if (d < 2) throw std::domain_error("factorial: dimension must be >= 2");
}

// Real roots of x^3 + p x^2 + q x + r (Cardano).
inline int cubic_roots(double p, double q, double r, double out[3]) {
    const double a = q - p * p / 3.0;
    const double b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    const double disc = b * b / 4.0 + a * a * a / 27.0;
    int count = 0;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-b / 2.0 + sq);
        const double v = std::cbrt(-b / 2.0 - sq);
        out[count++] = u + v - p / 3.0;
    } else {
        const double m = 2.0 * std::sqrt(-a / 3.0);
        const double theta = std::acos(std::clamp(3.0 * b / (a * m), -1.0, 1.0)) / 3.0;
        for (int k = 0; k < 3; ++k)
            out[count++] = m * std::cos(theta - 2.0 * pi * k / 3.0) - p / 3.0;
    }
    return count;
}

} // namespace detail

// (mu,s)-distortion of the 2^d design at half-width b, for s in {2,4}.
inline double factorial_distortion(int d, double b, int s) {
    detail::check_dim(d);
    const double c1 = detail::factorial_mean_v1(d);
    if (s == 2) return 1.0 - 2.0 * b * d * c1 + d * b * b;
    if (s == 4) {
        const double c2 = detail::factorial_sum_sq(d);
        const double db2 = d * b * b;
        return 1.0 + 4.0 * b * b * c2 + db2 * db2 + 2.0 * db2 - 4.0 * b * d * c1 * (1.0 + db2);
    }
    throw std::invalid_argument("factorial_distortion: only s = 2 and s = 4 are supported");
}

inline double factorial_distortion(const FactorialDesign& design, int s) {
    return factorial_distortion(design.d, design.b, s);
}

// Optimal half-width and criterion value; s is 2, 4 or +infinity (covering
// radius).
inline FactorialOptimum factorial_optimal(int d, double s) {
    detail::check_dim(d);
    if (std::isinf(s) && s > 0.0) {
        // CR^2(b) = 1 + d b^2 - 2 b, minimal at b = 1/d
        return {1.0 / d, std::sqrt(1.0 - 1.0 / d)};
    }
    if (s == 2.0) {
        const double b = detail::factorial_mean_v1(d);
        return {b, 1.0 - d * b * b};
    }
    if (s == 4.0) {
        // stationary points of the quartic: d^2 b^3 - 3 d^2 c1 b^2 + (2 c2 + d) b - d c1 = 0
        const double c1 = detail::factorial_mean_v1(d);
        const double c2 = detail::factorial_sum_sq(d);
        const double d2 = double(d) * double(d);
        double roots[3];
        const int nr = detail::cubic_roots(-3.0 * c1, (2.0 * c2 + d) / d2, -c1 / d, roots);
        double best_b = detail::factorial_mean_v1(d); // s=2 optimum as fallback seed
        double best_v = factorial_distortion(d, best_b, 4);
        for (int i = 0; i < nr; ++i) {
            if (!(roots[i] > 0.0)) continue;
            // one Newton polish of the derivative
            double b = roots[i];
            const double fp = 3.0 * d2 * b * b - 6.0 * d2 * c1 * b + (2.0 * c2 + d);
            const double f = d2 * b * b * b - 3.0 * d2 * c1 * b * b + (2.0 * c2 + d) * b - d * c1;
            if (fp != 0.0) b -= f / fp;
            const double v = factorial_distortion(d, b, 4);
            if (v < best_v) {
                best_v = v;
                best_b = b;
            }
        }
        return {best_b, best_v};
    }
    throw std::invalid_argument("factorial_optimal: s must be 2, 4 or infinity");
}

} // namespace sphq
