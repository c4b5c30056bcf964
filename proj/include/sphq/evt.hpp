#pragma once

// Extreme-value machinery for quantisers uniform on a sphere: the 1/n
// quantile kappa_{n,d} of Beta(delta,delta) with delta = (d-1)/2, its
// explicit bounds, the three growth regimes of n = n(d), the Weibull
// approximation of the distortion and of distance quantiles, and the
// resulting optimal-radius approximations.
//
// The minimum of n i.i.d. Beta(delta,delta) variables, rescaled by
// kappa_{n,d}, converges to the Weibull law F_d(t) = 1 - exp(-t^delta)
// whose k-th moment is Gamma(1 + k/delta).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sphq/common.hpp"
#include "sphq/quadrature.hpp"
#include "sphq/radial.hpp"
#include "sphq/special.hpp"

namespace sphq {

namespace detail {

inline double delta_of(int d) { return 0.5 * (d - 1); }

inline void check_evt_dim(int d, const char* who) {
    if (d < 3) throw std::domain_error(std::string(who) + ": requires d >= 3");
}

// Gamma(1 + k/delta), the k-th Weibull moment.
inline double weibull_moment(double k, double delta) {
    return std::exp(ln_gamma(1.0 + k / delta));
}

} // namespace detail

// kappa_{n,d}: solution of I_kappa(delta, delta) = 1/n.
inline double kappa(std::uint64_t n, int d) {
    detail::check_evt_dim(d, "kappa");
    if (n < 2) throw std::domain_error("kappa: requires n >= 2");
    const double delta = detail::delta_of(d);
    return inv_reg_inc_beta(1.0 / double(n), delta, delta);
}

struct KappaBounds {
    double lo, hi;
};

// Explicit envelope
//   lo = (1 - sqrt(1 - (2/n)^{1/(delta'-1)})) / 2
//   hi = (1 - sqrt((1 - 4 c_d n^{-1/delta})_+)) / 2,  c_d = [delta B(delta,delta)]^{1/delta},
// valid for d >= 5 (the lower-bound exponent needs delta' >= 2).
inline KappaBounds kappa_bounds(std::uint64_t n, int d) {
    if (d < 5) throw std::invalid_argument("kappa_bounds: unsupported below d = 5");
    if (n < 2) throw std::domain_error("kappa_bounds: requires n >= 2");
    const double delta = detail::delta_of(d);
    const int delta_prime = int(std::floor(delta));
    const double nd = double(n);
    const double lo = 0.5 * (1.0 - std::sqrt(1.0 - std::pow(2.0 / nd, 1.0 / (delta_prime - 1))));
    const double c_d = std::exp((std::log(delta) + ln_beta(delta, delta)) / delta);
    const double inner = 1.0 - 4.0 * c_d * std::pow(nd, -1.0 / delta);
    const double hi = 0.5 * (1.0 - std::sqrt(std::max(inner, 0.0)));
    return {lo, hi};
}

struct GrowthRegime {
    enum class Kind { super_exponential, exponential, sub_exponential };
    Kind kind = Kind::exponential;
    double lambda = 2.0; // only meaningful for the exponential regime
    double scale = 1.0;  // the constant C in n = C lambda^d (1 + o(1))

    static GrowthRegime super_exponential() { return {Kind::super_exponential, 0.0, 1.0}; }
    static GrowthRegime exponential(double lambda, double scale = 1.0) {
        if (!(lambda > 1.0)) throw std::domain_error("GrowthRegime: lambda must exceed 1");
        if (!(scale > 0.0)) throw std::domain_error("GrowthRegime: scale must be positive");
        return {Kind::exponential, lambda, scale};
    }
    static GrowthRegime sub_exponential() { return {Kind::sub_exponential, 0.0, 1.0}; }
};

// Limit of kappa_{n,d} as d -> infinity under the given growth of n(d).
inline double kappa_limit(const GrowthRegime& regime) {
    switch (regime.kind) {
    case GrowthRegime::Kind::super_exponential:
        return 0.0;
    case GrowthRegime::Kind::exponential:
        return 0.5 * (1.0 - std::sqrt(1.0 - 1.0 / (regime.lambda * regime.lambda)));
    case GrowthRegime::Kind::sub_exponential:
        return 0.5;
    }
    return 0.0;
}

// Limit of the optimal radius under the same regimes (unit concentration
// radius); independent of s.
inline double evt_limit_radius(const GrowthRegime& regime) {
    switch (regime.kind) {
    case GrowthRegime::Kind::super_exponential:
        return 1.0;
    case GrowthRegime::Kind::exponential:
        return std::sqrt(1.0 - 1.0 / (regime.lambda * regime.lambda));
    case GrowthRegime::Kind::sub_exponential:
        return 0.0;
    }
    return 0.0;
}

namespace detail {

// int_0^inf g(z) dF_d(z) with F_d(z) = 1 - exp(-z^delta), by adaptive
// quadrature of g(z) delta z^{delta-1} exp(-z^delta) on the truncated
// support.
template <class G>
double weibull_integral(const G& g, double delta, double rel_tol, double abs_tol) {
    const double z_hi = std::pow(42.0, 1.0 / delta); // tail mass below 1e-18
    const auto f = [&](double z) {
        if (z <= 0.0) return 0.0;
        const double zd = std::pow(z, delta);
        return g(z) * delta * zd / z * std::exp(-zd);
    };
    // split at the mode scale to help the rule along
    const double z_mid = std::min(1.0, 0.5 * z_hi);
    return adaptive_simpson(f, 0.0, z_mid, rel_tol, 0.5 * abs_tol, 48) +
           adaptive_simpson(f, z_mid, z_hi, rel_tol, 0.5 * abs_tol, 48);
}

// Closed moment form of the extreme-value distortion for even s:
// expand [(r-a)^2 + 4 a r kappa z]^{s/2} and integrate monomials against
// the Weibull and target radial laws.
inline double evt_even_closed(const RadialLaw& target, double a, double kap, int d, int s) {
    const double delta = delta_of(d);
    const int m = s / 2;
    double total = 0.0;
    for (int k = 0; k <= m; ++k) {
        double choose_mk = 1.0;
        for (int j = 0; j < k; ++j) choose_mk = choose_mk * double(m - j) / double(j + 1);
        const double factor =
            choose_mk * std::pow(4.0 * a * kap, k) * weibull_moment(k, delta);
        const int p2 = 2 * (m - k);
        for (int i = 0; i <= p2; ++i) {
            double choose_2ji = 1.0;
            for (int j = 0; j < i; ++j) choose_2ji = choose_2ji * double(p2 - j) / double(j + 1);
            const double sign = ((p2 - i) % 2 == 0) ? 1.0 : -1.0;
            total += factor * choose_2ji * sign * std::pow(a, p2 - i) *
                     radial_moment(target, i + k);
        }
    }
    return total;
}

inline bool even_moment_order(double s) {
    return s == std::floor(s) && int(s) % 2 == 0 && s >= 2.0 && s <= 64.0;
}

} // namespace detail

// Direct 2-D quadrature of the extreme-value approximation
//   E^s = int int [(r-a)^2 + 4 a r kappa z]^{s/2} dF_d(z) dPsi(r);
// reference path used to cross-check the closed moment forms.
inline double evt_distortion_quadrature(const RadialLaw& target, double a, std::uint64_t n,
                                        int d, double s, double rel_tol = 1.0e-10) {
    detail::check_evt_dim(d, "evt_distortion_quadrature");
    if (!(a >= 0.0)) throw std::domain_error("evt_distortion_quadrature: radius must be >= 0");
    if (!(s > 0.0)) throw std::domain_error("evt_distortion_quadrature: s must be > 0");
    const double delta = detail::delta_of(d);
    const double kap = kappa(n, d);
    const auto radius_term = [&](double r) {
        const double base = (r - a) * (r - a);
        const double slope = 4.0 * a * r * kap;
        return detail::weibull_integral(
            [&](double z) { return std::pow(base + slope * z, 0.5 * s); }, delta, rel_tol,
            rel_tol);
    };
    if (target.variant == RadialVariant::point_mass) return radius_term(target.param);
    return detail::gl_refined(
        [&](double r) { return radius_term(r) * radial_pdf(target, r); },
        radial_support_lo(target), radial_support_hi(target), rel_tol, rel_tol, 513);
}

// Extreme-value approximation of the (mu,s)-distortion of the sphere
// quantiser of radius a; moment closed form for even s, quadrature
// otherwise.
inline double evt_distortion(const RadialLaw& target, double a, std::uint64_t n, int d,
                             double s) {
    detail::check_evt_dim(d, "evt_distortion");
    if (!(a >= 0.0)) throw std::domain_error("evt_distortion: radius must be >= 0");
    if (!(s > 0.0)) throw std::domain_error("evt_distortion: s must be > 0");
    if (detail::even_moment_order(s))
        return detail::evt_even_closed(target, a, kappa(n, d), d, int(s));
    return evt_distortion_quadrature(target, a, n, d, s, 1.0e-10);
}

struct EvtOptimum {
    double a_star;
    double value;
};

namespace detail {

// golden-section over a >= 0 on the extreme-value objective
inline EvtOptimum evt_minimise(const RadialLaw& target, std::uint64_t n, int d, double s) {
    const double hi = 1.5 * radial_quantile(target, std::min(0.999999, radial_truncation_level));
    const double inv_phi = 0.6180339887498949;
    double lo = 0.0, hi2 = hi;
    double x1 = hi2 - inv_phi * (hi2 - lo), x2 = lo + inv_phi * (hi2 - lo);
    double f1 = evt_distortion(target, x1, n, d, s);
    double f2 = evt_distortion(target, x2, n, d, s);
    for (int it = 0; it < 200 && hi2 - lo > 1.0e-10; ++it) {
        if (f1 < f2) {
            hi2 = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi2 - inv_phi * (hi2 - lo);
            f1 = evt_distortion(target, x1, n, d, s);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi2 - lo);
            f2 = evt_distortion(target, x2, n, d, s);
        }
    }
    const double x = 0.5 * (lo + hi2);
    return {x, evt_distortion(target, x, n, d, s)};
}

} // namespace detail

// Minimiser of the extreme-value distortion over the sphere radius.
// s = 2: a* = M_1 [1 - 2 kappa Gamma(1+1/delta)] and E^2(a*) = M_2 - a*^2.
// s = 4: root of the cubic derivative of the moment form. Other s: search.
inline EvtOptimum evt_optimal_radius(const RadialLaw& target, std::uint64_t n, int d, double s) {
    detail::check_evt_dim(d, "evt_optimal_radius");
    if (!(s > 0.0)) throw std::domain_error("evt_optimal_radius: s must be > 0");
    const double delta = detail::delta_of(d);
    if (s == 2.0) {
        const double kap = kappa(n, d);
        const double m1 = radial_moment(target, 1);
        const double m2 = radial_moment(target, 2);
        const double a = m1 * (1.0 - 2.0 * kap * detail::weibull_moment(1, delta));
        return {a, m2 - a * a};
    }
    if (s == 4.0) {
        // derivative of the s = 4 moment form divided by 4:
        //   a^3 + 3 m1 (2 k g1 - 1) a^2 + m2 (3 - 8 k g1 + 8 k^2 g2) a + m3 (2 k g1 - 1) = 0
        const double kap = kappa(n, d);
        const double g1 = detail::weibull_moment(1, delta);
        const double g2 = detail::weibull_moment(2, delta);
        const double m1 = radial_moment(target, 1);
        const double m2 = radial_moment(target, 2);
        const double m3 = radial_moment(target, 3);
        const double p = 3.0 * m1 * (2.0 * kap * g1 - 1.0);
        const double q = m2 * (3.0 - 8.0 * kap * g1 + 8.0 * kap * kap * g2);
        const double r = m3 * (2.0 * kap * g1 - 1.0);
        // Cardano on the depressed form, then pick the admissible minimiser
        const double aa = q - p * p / 3.0;
        const double bb = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
        const double disc = bb * bb / 4.0 + aa * aa * aa / 27.0;
        std::vector<double> roots;
        if (disc > 0.0) {
            const double sq = std::sqrt(disc);
            roots.push_back(std::cbrt(-bb / 2.0 + sq) + std::cbrt(-bb / 2.0 - sq) - p / 3.0);
        } else {
            const double mm = 2.0 * std::sqrt(-aa / 3.0);
            const double theta =
                std::acos(std::clamp(3.0 * bb / (aa * mm), -1.0, 1.0)) / 3.0;
            for (int k = 0; k < 3; ++k)
                roots.push_back(mm * std::cos(theta - 2.0 * detail::pi * k / 3.0) - p / 3.0);
        }
        double best_a = 0.0;
        double best_v = evt_distortion(target, 0.0, n, d, 4.0);
        for (double a0 : roots) {
            if (!(a0 > 0.0)) continue;
            // one Newton polish on the cubic
            const double f = ((a0 + p) * a0 + q) * a0 + r;
            const double fp = (3.0 * a0 + 2.0 * p) * a0 + q;
            const double a1 = fp != 0.0 ? a0 - f / fp : a0;
            const double v = evt_distortion(target, a1, n, d, 4.0);
            if (v < best_v) {
                best_v = v;
                best_a = a1;
            }
        }
        return {best_a, best_v};
    }
    return detail::evt_minimise(target, n, d, s);
}

struct PointwiseMoments {
    double mean;
    std::optional<double> variance; // available for s in {2,4}
};

// s-moment (and, for s in {2,4}, the variance) of the distance from a
// fixed point at radius r to the random design, under the Weibull limit
// d^2 =d= (r-a)^2 + 4 a r kappa xi.
inline PointwiseMoments evt_pointwise_moments(double r, double a, std::uint64_t n, int d,
                                              double s) {
    detail::check_evt_dim(d, "evt_pointwise_moments");
    if (!(r >= 0.0) || !(a >= 0.0))
        throw std::domain_error("evt_pointwise_moments: radii must be >= 0");
    if (!(s > 0.0)) throw std::domain_error("evt_pointwise_moments: s must be > 0");
    const double delta = detail::delta_of(d);
    const double kap = kappa(n, d);

    if (r == 0.0) {
        // distance to every design point is a, deterministically
        PointwiseMoments out{std::pow(a, s), std::nullopt};
        if (s == 2.0 || s == 4.0) out.variance = 0.0;
        return out;
    }

    const double base = (r - a) * (r - a);
    const double slope = 4.0 * a * r * kap;
    PointwiseMoments out{
        detail::weibull_integral(
            [&](double z) { return std::pow(base + slope * z, 0.5 * s); }, delta, 1.0e-11,
            1.0e-12),
        std::nullopt};

    // variances via the unit-radius formulas and the exact scale reduction
    // var_s(r, a) = r^{2s} var_s(1, a/r)
    const double au = a / r;
    const double var_xi = detail::weibull_moment(2, delta) -
                          detail::sqr(detail::weibull_moment(1, delta));
    if (s == 2.0) {
        out.variance = std::pow(r, 4.0) * 16.0 * au * au * kap * kap * var_xi;
    } else if (s == 4.0) {
        const double var_xi2 = detail::weibull_moment(4, delta) -
                               detail::sqr(detail::weibull_moment(2, delta));
        const double cov13 = detail::weibull_moment(3, delta) -
                             detail::weibull_moment(1, delta) * detail::weibull_moment(2, delta);
        const double um = 1.0 - au;
        out.variance = std::pow(r, 8.0) * 64.0 * au * au * kap * kap *
                       (std::pow(um, 4.0) * var_xi + au * au * kap * kap * var_xi2 +
                        um * um * au * kap * cov13);
    }
    return out;
}

struct EvtQuantile {
    double q_hat;  // approximate gamma-quantile of the distance at radius a
    double a_star; // radius minimising that quantile
};

// Weibull quantile approximation on the unit-sphere target:
//   t_gamma = (-log(1-gamma))^{1/delta},
//   q_hat   = sqrt((1-a)^2 + 4 a kappa t_gamma),
//   a*      = max(0, 1 - 2 kappa t_gamma).
inline EvtQuantile evt_quantile(double gamma, double a, std::uint64_t n, int d) {
    detail::check_evt_dim(d, "evt_quantile");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("evt_quantile: gamma must lie strictly inside (0,1)");
    if (!(a >= 0.0)) throw std::domain_error("evt_quantile: radius must be >= 0");
    const double delta = detail::delta_of(d);
    const double kap = kappa(n, d);
    const double t_gamma = std::pow(-std::log1p(-gamma), 1.0 / delta);
    const double q = std::sqrt((1.0 - a) * (1.0 - a) + 4.0 * a * kap * t_gamma);
    return {q, std::max(0.0, 1.0 - 2.0 * kap * t_gamma)};
}

// Order gamma(d,2) = F_d[Gamma(1+1/delta)] at which the quantile
// approximation coincides with the L2 approximation; tends to
// 1 - exp(-exp(-euler_gamma)) ~ 0.429624 as d grows.
inline double evt_l2_quantile_order(int d) {
    detail::check_evt_dim(d, "evt_l2_quantile_order");
    const double delta = detail::delta_of(d);
    const double g1 = detail::weibull_moment(1, delta);
    return 1.0 - std::exp(-std::pow(g1, delta));
}

struct EvtSummary {
    double kappa_value;
    std::optional<KappaBounds> bounds; // defined for d >= 5
    double a_star;
    double e_hat; // extreme-value distortion at a_star
    double delta;
    int delta_prime;
};

inline EvtSummary evt_summary(const RadialLaw& target, std::uint64_t n, int d, double s) {
    detail::check_evt_dim(d, "evt_summary");
    EvtSummary out{};
    out.kappa_value = kappa(n, d);
    out.delta = detail::delta_of(d);
    out.delta_prime = int(std::floor(out.delta));
    if (d >= 5) out.bounds = kappa_bounds(n, d);
    const EvtOptimum opt = evt_optimal_radius(target, n, d, s);
    out.a_star = opt.a_star;
    out.e_hat = opt.value;
    return out;
}

} // namespace sphq
