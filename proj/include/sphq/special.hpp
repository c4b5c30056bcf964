#pragma once

// Special functions: log-gamma, regularised incomplete beta (with the
// clamping convention I_t = 0 for t <= 0 and I_t = 1 for t >= 1), its
// inverse, and the regularised lower incomplete gamma with its inverse.
// All routines work in 64-bit floating point, with beta/binomial
// prefactors assembled in log space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sphq/common.hpp"

namespace sphq {

inline double ln_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("ln_gamma: argument must be positive");
    // Lanczos, g = 7, 9 terms.
    static constexpr double c[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection keeps the series argument >= 0.5
        return std::log(detail::pi / std::sin(detail::pi * x)) - ln_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
    const double t = z + 7.5;
    return 0.91893853320467274178 + (z + 0.5) * std::log(t) - t + std::log(a);
}

inline double ln_beta(double a, double b) {
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr double eps = 3.0e-16;
    constexpr double fpmin = 1.0e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) return h;
    }
    throw numerical_error("beta_cf: continued fraction failed to converge");
}

} // namespace detail

// I_t(a,b) under the clamping convention: 0 for t <= 0, 1 for t >= 1.
inline double reg_inc_beta(double t, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a,b must be positive");
    if (!std::isfinite(t)) throw std::domain_error("reg_inc_beta: t must be finite");
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double lnbt = a * std::log(t) + b * std::log1p(-t) - ln_beta(a, b);
    const double bt = std::exp(lnbt);
    // symmetry split at the mean a/(a+b)
    if (t < a / (a + b)) return bt * detail::beta_cf(a, b, t) / a;
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - t) / b;
}

namespace detail {

// Symmetric incomplete beta I_t(delta, delta) for the hot inner loops.
// Integer delta uses the finite binomial sum; half-integer delta walks the
// contiguous recurrences up from I_t(1/2,1/2) = (2/pi) asin(sqrt t);
// anything else falls through to the continued fraction.
class SymmetricIncBeta {
public:
    explicit SymmetricIncBeta(double delta) : delta_(delta) {
        const double r = std::round(delta);
        if (delta > 0.0 && delta <= 64.0 && delta == r) {
            kind_ = Kind::integer;
        } else if (delta > 0.0 && delta <= 64.0 && delta == std::floor(delta) + 0.5) {
            kind_ = Kind::half_integer;
        } else {
            kind_ = Kind::generic;
        }
    }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        switch (kind_) {
        case Kind::integer: {
            // I_t(m,m) = sum_{k=0}^{m-1} C(2m-1,k) t^{2m-1-k} (1-t)^k
            const int m = int(delta_);
            const double omt = 1.0 - t;
            double coeff = 1.0;                       // C(2m-1, k)
            double tp = std::pow(t, 2 * m - 1);       // t^{2m-1-k}
            double op = 1.0;                          // (1-t)^k
            double sum = 0.0;
            for (int k = 0; k < m; ++k) {
                sum += coeff * tp * op;
                coeff = coeff * double(2 * m - 1 - k) / double(k + 1);
                tp /= t;
                op *= omt;
            }
            return std::min(sum, 1.0);
            }
        case Kind::half_integer: {
            // raise both parameters from (1/2, 1/2) with
            //   I(a+1,b) = I(a,b) - T(a,b)/a,  I(a,b+1) = I(a,b) + T(a,b)/b,
            //   T(a,b) = t^a (1-t)^b / B(a,b)
            const double st = std::sqrt(t);
            double value = (2.0 / pi) * std::asin(st);
            double av = 0.5, bv = 0.5;
            double term = st * std::sqrt(1.0 - t) / pi; // T(1/2,1/2)
            const int steps = int(delta_ - 0.5);
            for (int k = 0; k < steps; ++k) {
                value -= term / av;
                term *= t * (av + bv) / av;
                av += 1.0;
                value += term / bv;
                term *= (1.0 - t) * (av + bv) / bv;
                bv += 1.0;
            }
            return std::clamp(value, 0.0, 1.0);
            }
        case Kind::generic:
            break;
        }
        return reg_inc_beta(t, delta_, delta_);
    }

private:
    enum class Kind { integer, half_integer, generic };
    double delta_;
    Kind kind_;
};

} // namespace detail

// Inverse of reg_inc_beta in its first argument: the p-quantile of Beta(a,b).
// Newton from an asymptotic seed, with a bisection bracket as safeguard;
// converges to |I_t(a,b) - p| <= 1e-13 (or to a machine-width bracket).
inline double inv_reg_inc_beta(double p, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("inv_reg_inc_beta: a,b must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("inv_reg_inc_beta: p must lie in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    if (p == 0.5 && a == b) return 0.5; // symmetry
    if (p > 0.5) return 1.0 - inv_reg_inc_beta(1.0 - p, b, a);

    const double lnbeta = ln_beta(a, b);
    double x;
    // leading-order inversion of I_x ~ x^a / (a B(a,b)) in the lower tail
    const double x_pow = std::exp((std::log(p) + std::log(a) + lnbeta) / a);
    if (p < 1.0e-3 && x_pow < 0.05) {
        x = x_pow;
    } else if (a >= 1.0 && b >= 1.0) {
        // normal seed (Abramowitz & Stegun 26.5.22)
        const double pp = p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        z = -z;
        const double al = (z * z - 3.0) / 6.0;
        const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        const double w = z * std::sqrt(al + h) / h -
                         (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                             (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        x = a / (a + b * std::exp(2.0 * w));
    } else {
        const double lna = std::log(a / (a + b)), lnb = std::log(b / (a + b));
        const double t = std::exp(a * lna) / a;
        const double u = std::exp(b * lnb) / b;
        const double w = t + u;
        if (p < t / w)
            x = std::pow(a * w * p, 1.0 / a);
        else
            x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
    x = std::fmin(std::fmax(x, 1.0e-300), 1.0 - 1.0e-16);

    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 300; ++it) {
        const double err = reg_inc_beta(x, a, b) - p;
        if (std::fabs(err) <= 2.0e-13 * p) return x;
        if (err > 0.0)
            hi = x;
        else
            lo = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return 0.5 * (lo + hi);
        const double dens =
            std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lnbeta);
        double xn = dens > 0.0 ? x - err / dens : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return x;
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 800; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1.0e-17)
            return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
    }
    throw numerical_error("gamma_p_series: no convergence");
}

inline double gamma_q_cf(double a, double x) {
    constexpr double fpmin = 1.0e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 800; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 3.0e-16)
            return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
    }
    throw numerical_error("gamma_q_cf: no convergence");
}

} // namespace detail

// Lower regularised incomplete gamma P(a,x).
inline double reg_inc_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("reg_inc_gamma: a must be positive");
    if (!(x >= 0.0)) throw std::domain_error("reg_inc_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

namespace detail {

// upper regularised incomplete gamma Q(a,x), accurate in the far tail
inline double reg_inc_gamma_q(double a, double x) {
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

} // namespace detail

// Inverse of P(a,.) in x; used for chi radial quantiles. The upper tail is
// solved through Q(a,x) = 1-p, which stays well conditioned where P rounds
// to one.
inline double inv_reg_inc_gamma(double p, double a) {
    if (!(a > 0.0)) throw std::domain_error("inv_reg_inc_gamma: a must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("inv_reg_inc_gamma: p must lie in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    const double gln = ln_gamma(a);
    const double a1 = a - 1.0;
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;

    double x;
    if (a > 1.0) {
        // Wilson-Hilferty seeded by the normal tail quantile
        const double t = std::sqrt(-2.0 * std::log(upper ? tail : p));
        double z = t - (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481));
        if (!upper) z = -z;
        x = std::fmax(1.0e-3,
                      a * std::pow(1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a)), 3));
    } else {
        const double t = 1.0 - a * (0.253 + a * 0.12);
        if (p < t)
            x = std::pow(p / t, 1.0 / a);
        else
            x = 1.0 - std::log1p(-(p - t) / (1.0 - t));
    }

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 300; ++it) {
        if (!(x > 0.0)) x = lo > 0.0 ? 2.0 * lo : 1.0e-12;
        // err has the sign of (x - quantile) on both tails
        const double err = upper ? tail - detail::reg_inc_gamma_q(a, x)
                                 : reg_inc_gamma(a, x) - tail;
        if (std::fabs(err) <= 2.0e-13 * tail) return x;
        if (err > 0.0)
            hi = x;
        else
            lo = x;
        if (std::isfinite(hi) && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return 0.5 * (lo + hi);
        const double dens = std::exp(-x + a1 * std::log(x) - gln);
        double xn = dens > 0.0 ? x - err / dens : std::nan("");
        if (!(xn > lo && (!std::isfinite(hi) || xn < hi)))
            xn = std::isfinite(hi) ? 0.5 * (lo + hi) : std::fmax(2.0 * lo, 2.0 * x);
        x = xn;
    }
    return x;
}

} // namespace sphq
