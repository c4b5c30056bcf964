#pragma once

// Exact (to quadrature tolerance) engine for random-quantiser distortion:
// hit probabilities, the mean distance c.d.f., the expected (mu,s)-
// distortion, its distance quantiles, and the sphere-with-origin-atom
// mixture on the unit-sphere target.
//
// The expected distortion of an i.i.d. n-point quantiser is
//     D = s * int t^{s-1} E_target{ (1 - P{||X - u|| <= t})^n } dt,
// where the hit probability is itself an integral of the clamped
// incomplete beta over the quantiser's radial law. The t-integration is
// carried out in the variable u = t^s (bounded integrand for every s > 0)
// on segments refined geometrically towards the lower support endpoint,
// where the integrand decays on the scale of the 1/n beta quantile.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sphq/common.hpp"
#include "sphq/quadrature.hpp"
#include "sphq/radial.hpp"

namespace sphq {

struct DistortionQuery {
    int d = 3;
    std::uint64_t n = 1;
    double s = 2.0;
    RadialLaw target = RadialLaw::point_mass(1.0, 3);
    QuantiserFamily quantiser = QuantiserFamily::sphere(1.0, 3);
    QuadratureConfig quad{};
};

namespace detail {

inline void validate(const DistortionQuery& q) {
    if (q.d < 2) throw std::domain_error("DistortionQuery: dimension must be >= 2");
    if (q.n < 1) throw std::domain_error("DistortionQuery: design size must be >= 1");
    if (!(q.s > 0.0)) throw std::domain_error("DistortionQuery: moment order must be > 0");
    if (q.target.dim != q.d || q.quantiser.dim != q.d)
        throw std::domain_error("DistortionQuery: target and quantiser must share d");
}

} // namespace detail

// upsilon(t, rho, r) = [t^2 - (rho - r)^2] / (4 rho r); callers handle the
// degenerate rho = 0 or r = 0 cases and clamp through the incomplete-beta
// convention.
inline double nu_factor(double t, double rho, double r) {
    return (t * t - (rho - r) * (rho - r)) / (4.0 * rho * r);
}

namespace detail {

// Hit-probability evaluator with the family constants hoisted out of the
// inner loops.
class HitEvaluator {
public:
    HitEvaluator(const QuantiserFamily& quantiser, const QuadratureConfig& quad)
        : comp_(quantiser.component_law()),
          alpha_(quantiser.atom_weight),
          inc_beta_(0.5 * (quantiser.dim - 1)),
          pdf_(comp_),
          comp_hi_(radial_support_hi(comp_)),
          quad_(quad) {}

    const RadialLaw& component() const { return comp_; }
    double atom_weight() const { return alpha_; }

    // P{ ||X - u|| <= t } for ||u|| = r
    double operator()(double r, double t) const {
        const double p = component_hit(r, t);
        if (alpha_ < 1.0) return alpha_ * p + (1.0 - alpha_) * (t >= r ? 1.0 : 0.0);
        return p;
    }

private:
    double component_hit(double r, double t) const {
        if (comp_.variant == RadialVariant::point_mass) {
            const double rho = comp_.param;
            if (rho == 0.0) return t >= r ? 1.0 : 0.0;
            if (r == 0.0) return t >= rho ? 1.0 : 0.0;
            if (t <= std::fabs(r - rho)) return 0.0;
            if (t >= r + rho) return 1.0;
            return inc_beta_(nu_factor(t, rho, r));
        }
        if (r == 0.0) return radial_cdf(comp_, t);
        // rho <= t - r hits with probability one; the remaining window
        // carries the smooth incomplete-beta factor
        double p = t > r ? radial_cdf(comp_, t - r) : 0.0;
        const double wlo = std::fabs(t - r);
        const double whi = std::min(t + r, comp_hi_);
        if (whi > wlo)
            p += gl_refined(
                [&](double rho) { return inc_beta_(nu_factor(t, rho, r)) * pdf_(rho); }, wlo,
                whi, 0.1 * quad_.rel_tol, 0.1 * quad_.abs_tol, quad_.radial_nodes);
        return std::clamp(p, 0.0, 1.0);
    }

    RadialLaw comp_;
    double alpha_;
    SymmetricIncBeta inc_beta_;
    RadialPdf pdf_;
    double comp_hi_;
    QuadratureConfig quad_;
};

// Survival evaluator S(t) = E_target{ (1 - hit)^n }. Only target radii
// within distance t of the quantiser support can be hit, so the rest of
// the target mass contributes one.
class SurvivalEvaluator {
public:
    SurvivalEvaluator(const DistortionQuery& q)
        : q_(q), hit_(q.quantiser, q.quad), target_pdf_(q.target) {
        rho_lo_ = radial_support_lo(hit_.component());
        rho_hi_ = radial_support_hi(hit_.component());
        r_hi_ = radial_support_hi(q.target);
    }

    double operator()(double t) const {
        const double n = double(q_.n);
        const auto miss = [&](double r) { return pow_one_minus(hit_(r, t), n); };
        if (q_.target.variant == RadialVariant::point_mass) return miss(q_.target.param);

        struct Window {
            double lo, hi;
        };
        Window wins[2];
        int n_wins = 0;
        wins[n_wins++] = {std::max(0.0, rho_lo_ - t), std::min(rho_hi_ + t, r_hi_)};
        if (hit_.atom_weight() < 1.0) wins[n_wins++] = {0.0, std::min(t, r_hi_)};
        if (n_wins == 2 && wins[1].lo < wins[0].lo) std::swap(wins[0], wins[1]);
        if (n_wins == 2 && wins[1].lo <= wins[0].hi) {
            wins[0].hi = std::max(wins[0].hi, wins[1].hi);
            n_wins = 1;
        }

        double value = 1.0;
        const double kinks[] = {t - rho_hi_, t - rho_lo_, t,        rho_lo_ - t,
                                rho_lo_ + t, rho_hi_ - t, rho_hi_ + t};
        for (int w = 0; w < n_wins; ++w) {
            if (!(wins[w].hi > wins[w].lo)) continue;
            value -= radial_cdf(q_.target, wins[w].hi) - radial_cdf(q_.target, wins[w].lo);
            double cuts[10];
            int n_cuts = 0;
            cuts[n_cuts++] = wins[w].lo;
            for (double c : kinks)
                if (c > wins[w].lo + 1.0e-13 * r_hi_ && c < wins[w].hi - 1.0e-13 * r_hi_)
                    cuts[n_cuts++] = c;
            cuts[n_cuts++] = wins[w].hi;
            std::sort(cuts, cuts + n_cuts);
            for (int i = 0; i + 1 < n_cuts; ++i)
                value += gl_refined(
                    [&](double r) { return miss(r) * target_pdf_(r); }, cuts[i], cuts[i + 1],
                    q_.quad.rel_tol, q_.quad.abs_tol, q_.quad.radial_nodes);
        }
        return std::clamp(value, 0.0, 1.0);
    }

private:
    DistortionQuery q_;
    HitEvaluator hit_;
    RadialPdf target_pdf_;
    double rho_lo_, rho_hi_, r_hi_;
};

// s * int_{t_min}^{t_max} t^{s-1} S(t) dt, computed in the variable u = t^s.
// `spike_width` sets the geometric refinement towards t_min where S decays.
template <class SurvFn>
double distortion_tail_integral(const SurvFn& S, double t_min, double t_max, double s,
                                std::vector<double> extra_cuts, double spike_width,
                                const QuadratureConfig& quad) {
    const double span = t_max - t_min;
    if (!(span > 0.0)) return 0.0;

    const double w = std::max(spike_width, span * 1.0e-12);
    const int levels = std::clamp(int(std::ceil(std::log2(span / w))) + 2, 3, 48);
    std::vector<double> cuts;
    cuts.reserve(extra_cuts.size() + levels + 2);
    cuts.push_back(t_min);
    for (int k = levels; k >= 1; --k) cuts.push_back(t_min + span * std::ldexp(1.0, -k));
    for (double c : extra_cuts)
        if (c > t_min && c < t_max) cuts.push_back(c);
    cuts.push_back(t_max);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return b - a < span * 1.0e-13; }),
               cuts.end());
    cuts.back() = t_max;

    const double inv_s = 1.0 / s;
    const auto g = [&](double u) { return S(std::pow(u, inv_s)); };
    const double u_lo = std::pow(t_min, s), u_hi = std::pow(t_max, s);
    const double u_span = u_hi - u_lo;

    // coarse pass: a 3-point estimate per segment sizes the error budgets,
    // so that segments negligible against the whole are not over-refined
    std::vector<double> seg_lo(cuts.size() - 1), seg_hi(cuts.size() - 1);
    double coarse = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        seg_lo[i] = std::pow(cuts[i], s);
        seg_hi[i] = std::pow(cuts[i + 1], s);
        const double h = seg_hi[i] - seg_lo[i];
        if (!(h > 0.0)) continue;
        coarse += (h / 6.0) * (g(seg_lo[i]) + 4.0 * g(0.5 * (seg_lo[i] + seg_hi[i])) +
                               g(seg_hi[i]));
    }
    const double share =
        0.25 * quad.rel_tol * std::fabs(coarse) / double(std::max<std::size_t>(cuts.size(), 2));

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = seg_lo[i], b = seg_hi[i];
        if (!(b > a)) continue;
        const double abs_budget =
            std::max(quad.abs_tol * std::max((b - a) / u_span, 1.0e-6), share);
        total += adaptive_simpson(g, a, b, quad.rel_tol, abs_budget, quad.max_depth);
    }
    return total;
}

// 1/n quantile of Beta(delta, delta); sets the resolution of the decay of
// the survival factor near the support edge.
inline double spike_scale(const DistortionQuery& q, double t_min, double rho_hi, double r_hi) {
    double kap = 1.0;
    if (q.n >= 2) {
        const double delta = 0.5 * (q.d - 1);
        kap = inv_reg_inc_beta(1.0 / double(q.n), delta, delta);
    }
    return std::sqrt(t_min * t_min + 4.0 * rho_hi * r_hi * kap) - t_min;
}

// Unit-sphere target, sphere quantiser, d = 3, even s: the distortion is a
// polynomial in the radius. Substituting x for the beta argument turns the
// tail integral into beta moments B(k+1, n+1).
inline double d3_sphere_closed_form(std::uint64_t n, int s, double a) {
    const int m = s / 2 - 1;
    const double one_minus = 1.0 - a;
    double sum = 0.0;
    for (int k = 0; k <= m; ++k) {
        double choose = 1.0;
        for (int j = 0; j < k; ++j) choose = choose * double(m - j) / double(j + 1);
        double beta_mom = 1.0 / double(n + 1);
        for (int j = 1; j <= k; ++j) beta_mom *= double(j) / double(n + 1 + j);
        sum += choose * std::pow(one_minus * one_minus, m - k) * std::pow(4.0 * a, k) * beta_mom;
    }
    return std::pow(one_minus, s) + 2.0 * a * s * sum;
}

inline bool d3_closed_form_applies(const DistortionQuery& q) {
    if (q.d != 3) return false;
    if (q.target.variant != RadialVariant::point_mass || !(q.target.param > 0.0)) return false;
    const bool sphere_law = q.quantiser.variant == QuantiserVariant::sphere_uniform ||
                            (q.quantiser.variant == QuantiserVariant::sphere_with_atom &&
                             q.quantiser.atom_weight == 1.0);
    if (!sphere_law) return false;
    const double s = q.s;
    return s == std::floor(s) && int(s) % 2 == 0 && s >= 2.0 && s <= 64.0;
}

} // namespace detail

// P{ ||X - u|| <= t } for ||u|| = r and X drawn from the quantiser law.
inline double hit_probability(const QuantiserFamily& quantiser, double r, double t,
                              const QuadratureConfig& cfg = {}) {
    if (!(r >= 0.0) || !(t >= 0.0))
        throw std::domain_error("hit_probability: r and t must be nonnegative");
    return detail::HitEvaluator(quantiser, cfg)(r, t);
}

// Mean distance c.d.f. F_n(t) = 1 - E_target{ (1 - hit)^n }.
inline double mean_distance_cdf(const DistortionQuery& q, double t) {
    detail::validate(q);
    if (!(t >= 0.0)) throw std::domain_error("mean_distance_cdf: t must be nonnegative");
    return 1.0 - detail::SurvivalEvaluator(q)(t);
}

// Generic quadrature path for the expected (mu,s)-distortion.
inline double expected_distortion_quadrature(const DistortionQuery& q) {
    detail::validate(q);
    const RadialLaw comp = q.quantiser.component_law();
    double rho_lo = radial_support_lo(comp);
    const double rho_hi = radial_support_hi(comp);
    if (q.quantiser.atom_weight < 1.0) rho_lo = 0.0;
    const double r_lo = radial_support_lo(q.target);
    const double r_hi = radial_support_hi(q.target);

    double t_min = 0.0;
    if (rho_lo > r_hi)
        t_min = rho_lo - r_hi;
    else if (r_lo > rho_hi)
        t_min = r_lo - rho_hi;
    const double t_max = r_hi + rho_hi;
    if (!(t_max > t_min)) return std::pow(t_min, q.s);

    std::vector<double> cuts = {std::fabs(r_lo - rho_lo), std::fabs(r_lo - rho_hi),
                                std::fabs(r_hi - rho_lo), r_lo + rho_lo,
                                r_lo + rho_hi,            r_hi + rho_lo};
    if (q.quantiser.atom_weight < 1.0) {
        cuts.push_back(r_lo);
        cuts.push_back(r_hi);
    }
    const double width = detail::spike_scale(q, t_min, rho_hi, r_hi);
    const detail::SurvivalEvaluator survival(q);
    const double tail = detail::distortion_tail_integral(survival, t_min, t_max, q.s,
                                                         std::move(cuts), width, q.quad);
    return std::pow(t_min, q.s) + tail;
}

// Expected (mu,s)-distortion of the i.i.d. n-point quantiser. Dispatches to
// the d = 3 closed form where it exists, otherwise integrates.
inline double expected_distortion(const DistortionQuery& q) {
    detail::validate(q);
    if (detail::d3_closed_form_applies(q)) {
        const double r0 = q.target.param;
        return std::pow(r0, q.s) *
               detail::d3_sphere_closed_form(q.n, int(q.s), q.quantiser.param / r0);
    }
    return expected_distortion_quadrature(q);
}

// Distortion of the mixture alpha * sphere(a) + (1-alpha) * atom at the
// origin, for the unit-sphere target:
//   (1-a)^s + s int_{1-a}^{1} t^{s-1} [1 - alpha I_u]^n dt
//           + s alpha^n int_{1}^{1+a} t^{s-1} [1 - I_u]^n dt .
inline double mixture_distortion(int d, std::uint64_t n, double s, double alpha, double a,
                                 const QuadratureConfig& quad = {}) {
    if (d < 2) throw std::domain_error("mixture_distortion: dimension must be >= 2");
    if (n < 1) throw std::domain_error("mixture_distortion: design size must be >= 1");
    if (!(s > 0.0)) throw std::domain_error("mixture_distortion: moment order must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("mixture_distortion: alpha must lie in [0,1]");
    if (!(a >= 0.0)) throw std::domain_error("mixture_distortion: radius must be >= 0");
    if (a == 0.0) return 1.0; // every point sits at the origin, distance is 1

    const double delta = 0.5 * (d - 1);
    const detail::SymmetricIncBeta inc_beta(delta);
    const double nd = double(n);
    const double gap2 = (1.0 - a) * (1.0 - a);
    const auto inc_beta_nu = [&](double t) { return inc_beta((t * t - gap2) / (4.0 * a)); };
    const double t_lo = std::fabs(1.0 - a);

    double total = std::pow(t_lo, s);
    const double width =
        std::sqrt(t_lo * t_lo +
                  4.0 * a * (n >= 2 ? inv_reg_inc_beta(1.0 / nd, delta, delta) : 1.0)) -
        t_lo;
    if (t_lo < 1.0)
        total += detail::distortion_tail_integral(
            [&](double t) { return detail::pow_one_minus(alpha * inc_beta_nu(t), nd); }, t_lo,
            1.0, s, {}, width, quad);
    const double atom_pow = alpha > 0.0 ? std::exp(nd * std::log(alpha)) : 0.0;
    if (atom_pow > 0.0) {
        const double lo2 = std::max(1.0, t_lo);
        total += atom_pow *
                 detail::distortion_tail_integral(
                     [&](double t) { return detail::pow_one_minus(inc_beta_nu(t), nd); }, lo2,
                     1.0 + a, s, {}, 0.25 * a, quad);
    }
    return total;
}

// Smallest and largest distances carrying mass; used for quantile brackets.
inline std::pair<double, double> distance_support(const DistortionQuery& q) {
    const RadialLaw comp = q.quantiser.component_law();
    double rho_lo = radial_support_lo(comp);
    const double rho_hi = radial_support_hi(comp);
    if (q.quantiser.atom_weight < 1.0) rho_lo = 0.0;
    const double r_lo = radial_support_lo(q.target);
    const double r_hi = radial_support_hi(q.target);
    double t_min = 0.0;
    if (rho_lo > r_hi)
        t_min = rho_lo - r_hi;
    else if (r_lo > rho_hi)
        t_min = r_lo - rho_hi;
    return {t_min, r_hi + rho_hi};
}

// gamma-quantile of the mean distance c.d.f., by bracketing + bisection on
// the monotone c.d.f.; gamma in {0,1} returns the support endpoints.
inline double distance_quantile(const DistortionQuery& q, double gamma) {
    detail::validate(q);
    const auto [t_min, t_max] = distance_support(q);
    if (gamma == 0.0) return t_min;
    if (gamma == 1.0) return t_max;
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("distance_quantile: gamma must lie in [0,1]");

    DistortionQuery tight = q;
    tight.quad.rel_tol = std::min(q.quad.rel_tol, 1.0e-10);
    tight.quad.abs_tol = std::min(q.quad.abs_tol, 1.0e-13);
    const detail::SurvivalEvaluator survival(tight);
    double lo = t_min, hi = t_max;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double f = 1.0 - survival(mid);
        if (std::fabs(f - gamma) <= 1.0e-9) return mid;
        if (f < gamma)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1.0e-13 * std::max(1.0, hi)) break;
    }
    return mid;
}

} // namespace sphq
