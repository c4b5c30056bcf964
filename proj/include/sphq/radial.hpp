#pragma once

// Radial laws of ||U|| (target) and ||X|| (quantiser), and the parametric
// quantiser families built on them. All types are immutable value types.
//
// Variants:
//   PointMass(a)     mass at radius a        -> uniform measure on a sphere
//   BallPower(b,d)   density d rho^{d-1}/b^d -> uniform measure in a ball
//   ScaledChi(s,d)   ||X|| for N(0, s^2 I/d) -> sqrt(chi^2_d/d) scaled by s

#include <cmath>
#include <stdexcept>

#include "sphq/common.hpp"
#include "sphq/special.hpp"

namespace sphq {

enum class RadialVariant { point_mass, ball_power, scaled_chi };

struct RadialLaw {
    RadialVariant variant;
    double param; // radius a, radius b, or scale sigma
    int dim;

    static RadialLaw point_mass(double a, int d) {
        check_dim(d);
        if (!(a >= 0.0)) throw std::domain_error("RadialLaw: point mass radius must be >= 0");
        return {RadialVariant::point_mass, a, d};
    }
    static RadialLaw ball_power(double b, int d) {
        check_dim(d);
        if (!(b > 0.0)) throw std::domain_error("RadialLaw: ball radius must be > 0");
        return {RadialVariant::ball_power, b, d};
    }
    static RadialLaw scaled_chi(double sigma, int d) {
        check_dim(d);
        if (!(sigma > 0.0)) throw std::domain_error("RadialLaw: chi scale must be > 0");
        return {RadialVariant::scaled_chi, sigma, d};
    }

private:
    static void check_dim(int d) {
        if (d < 2) throw std::domain_error("RadialLaw: dimension must be >= 2");
    }
};

// Quantile level at which unbounded supports are truncated for quadrature.
inline constexpr double radial_truncation_level = 1.0 - 1.0e-14;

inline double radial_moment(const RadialLaw& law, int k) {
    if (k < 0) throw std::domain_error("radial_moment: order must be >= 0");
    if (k == 0) return 1.0;
    const double d = law.dim;
    switch (law.variant) {
    case RadialVariant::point_mass:
        return std::pow(law.param, k);
    case RadialVariant::ball_power:
        return d * std::pow(law.param, k) / (d + k);
    case RadialVariant::scaled_chi:
        return std::exp(k * std::log(law.param) + 0.5 * k * std::log(2.0 / d) +
                        ln_gamma(0.5 * (k + d)) - ln_gamma(0.5 * d));
    }
    return 0.0; // unreachable
}

inline double radial_cdf(const RadialLaw& law, double rho) {
    if (!(rho >= 0.0)) throw std::domain_error("radial_cdf: radius must be >= 0");
    switch (law.variant) {
    case RadialVariant::point_mass:
        return rho >= law.param ? 1.0 : 0.0;
    case RadialVariant::ball_power: {
        if (rho >= law.param) return 1.0;
        return std::pow(rho / law.param, law.dim);
    }
    case RadialVariant::scaled_chi: {
        const double z = rho / law.param;
        return reg_inc_gamma(0.5 * law.dim, 0.5 * law.dim * z * z);
    }
    }
    return 0.0;
}

inline double radial_quantile(const RadialLaw& law, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("radial_quantile: p must lie in [0,1]");
    switch (law.variant) {
    case RadialVariant::point_mass:
        return law.param;
    case RadialVariant::ball_power:
        return law.param * std::pow(p, 1.0 / law.dim);
    case RadialVariant::scaled_chi: {
        const double x = inv_reg_inc_gamma(p, 0.5 * law.dim);
        return law.param * std::sqrt(2.0 * x / law.dim);
    }
    }
    return 0.0;
}

// Density of the radial law; the point mass has none and must be handled
// by the degenerate branches of the callers.
inline double radial_pdf(const RadialLaw& law, double rho) {
    switch (law.variant) {
    case RadialVariant::ball_power: {
        if (rho < 0.0 || rho > law.param) return 0.0;
        return law.dim * std::pow(rho, law.dim - 1) / std::pow(law.param, law.dim);
    }
    case RadialVariant::scaled_chi: {
        if (rho <= 0.0) return 0.0;
        const double d = law.dim, z = rho / law.param;
        const double lng = 0.5 * d * std::log(0.5 * d) + std::log(2.0) - ln_gamma(0.5 * d) +
                           (d - 1.0) * std::log(z) - 0.5 * d * z * z;
        return std::exp(lng) / law.param;
    }
    case RadialVariant::point_mass:
        throw std::domain_error("radial_pdf: point mass has no density");
    }
    return 0.0;
}

namespace detail {

// radial_pdf with the normalising constants hoisted out of the hot loops
class RadialPdf {
public:
    explicit RadialPdf(const RadialLaw& law) : law_(law) {
        if (law.variant == RadialVariant::ball_power) {
            log_norm_ = std::log(double(law.dim)) - law.dim * std::log(law.param);
        } else if (law.variant == RadialVariant::scaled_chi) {
            const double d = law.dim;
            log_norm_ = 0.5 * d * std::log(0.5 * d) + std::log(2.0) - ln_gamma(0.5 * d) -
                        std::log(law.param);
        }
    }

    double operator()(double rho) const {
        switch (law_.variant) {
        case RadialVariant::ball_power:
            if (rho < 0.0 || rho > law_.param) return 0.0;
            return std::exp(log_norm_ + (law_.dim - 1) * std::log(rho));
        case RadialVariant::scaled_chi: {
            if (rho <= 0.0) return 0.0;
            const double z = rho / law_.param;
            return std::exp(log_norm_ + (law_.dim - 1.0) * std::log(z) -
                            0.5 * law_.dim * z * z);
        }
        case RadialVariant::point_mass:
            break;
        }
        return 0.0;
    }

private:
    RadialLaw law_;
    double log_norm_ = 0.0;
};

} // namespace detail

// [lo, hi] interval carrying the (possibly truncated) mass of the law.
inline double radial_support_hi(const RadialLaw& law) {
    switch (law.variant) {
    case RadialVariant::point_mass:
        return law.param;
    case RadialVariant::ball_power:
        return law.param;
    case RadialVariant::scaled_chi:
        return radial_quantile(law, radial_truncation_level);
    }
    return 0.0;
}

inline double radial_support_lo(const RadialLaw& law) {
    return law.variant == RadialVariant::point_mass ? law.param : 0.0;
}

enum class QuantiserVariant { sphere_uniform, ball_uniform, normal_scaled, sphere_with_atom };

// Spherically symmetric quantiser law for the i.i.d. points of a random
// design. sphere_with_atom(alpha, a) mixes the uniform sphere law (weight
// alpha) with a point mass at the origin (weight 1-alpha).
struct QuantiserFamily {
    QuantiserVariant variant;
    double param;       // a, b or sigma
    double atom_weight; // alpha; 1 for the pure families
    int dim;

    static QuantiserFamily sphere(double a, int d) {
        check_dim(d);
        if (!(a >= 0.0)) throw std::domain_error("QuantiserFamily: sphere radius must be >= 0");
        return {QuantiserVariant::sphere_uniform, a, 1.0, d};
    }
    static QuantiserFamily ball(double b, int d) {
        check_dim(d);
        if (!(b > 0.0)) throw std::domain_error("QuantiserFamily: ball radius must be > 0");
        return {QuantiserVariant::ball_uniform, b, 1.0, d};
    }
    static QuantiserFamily normal(double sigma, int d) {
        check_dim(d);
        if (!(sigma > 0.0)) throw std::domain_error("QuantiserFamily: scale must be > 0");
        return {QuantiserVariant::normal_scaled, sigma, 1.0, d};
    }
    static QuantiserFamily sphere_with_atom(double alpha, double a, int d) {
        check_dim(d);
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::domain_error("QuantiserFamily: atom weight must lie in [0,1]");
        if (!(a >= 0.0)) throw std::domain_error("QuantiserFamily: sphere radius must be >= 0");
        return {QuantiserVariant::sphere_with_atom, a, alpha, d};
    }

    // Radial law of the non-atom component.
    RadialLaw component_law() const {
        switch (variant) {
        case QuantiserVariant::sphere_uniform:
        case QuantiserVariant::sphere_with_atom:
            return RadialLaw::point_mass(param, dim);
        case QuantiserVariant::ball_uniform:
            return RadialLaw::ball_power(param, dim);
        case QuantiserVariant::normal_scaled:
            return RadialLaw::scaled_chi(param, dim);
        }
        return RadialLaw::point_mass(param, dim); // unreachable
    }

    QuantiserFamily with_param(double value) const {
        switch (variant) {
        case QuantiserVariant::sphere_uniform:
            return sphere(value, dim);
        case QuantiserVariant::ball_uniform:
            return ball(value, dim);
        case QuantiserVariant::normal_scaled:
            return normal(value, dim);
        case QuantiserVariant::sphere_with_atom:
            return sphere_with_atom(atom_weight, value, dim);
        }
        return *this; // unreachable
    }

    QuantiserFamily with_atom_weight(double alpha) const {
        if (variant != QuantiserVariant::sphere_with_atom)
            throw std::domain_error("QuantiserFamily: only the atom mixture has a weight");
        return sphere_with_atom(alpha, param, dim);
    }

private:
    static void check_dim(int d) {
        if (d < 2) throw std::domain_error("QuantiserFamily: dimension must be >= 2");
    }
};

} // namespace sphq
