#pragma once

// Derivative-free scalar optimisation of quantiser parameters against the
// exact (or mixture) distortion objectives, and the dichotomous search for
// the crossover design size between two competing families.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "sphq/common.hpp"
#include "sphq/distortion.hpp"
#include "sphq/radial.hpp"

namespace sphq {

struct SearchConfig {
    double lo = 0.0;
    double hi = 1.0;
    double tol = 1.0e-6;
    int max_iter = 200;
};

struct SearchResult {
    double x;
    double f;
    int evals;
    bool converged; // false: eval budget ran out before the bracket closed
};

// Golden-section minimisation of a unimodal f on [lo, hi]; returns the best
// iterate seen even when the budget runs out.
template <class F>
SearchResult golden_section(const F& f, const SearchConfig& cfg) {
    if (!(cfg.hi > cfg.lo)) throw std::domain_error("golden_section: requires lo < hi");
    if (!(cfg.tol > 0.0)) throw std::domain_error("golden_section: tolerance must be > 0");
    constexpr double inv_phi = 0.61803398874989484820;
    double lo = cfg.lo, hi = cfg.hi;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    int evals = 2;
    double best_x = f1 <= f2 ? x1 : x2;
    double best_f = f1 <= f2 ? f1 : f2;
    while (hi - lo > cfg.tol && evals < cfg.max_iter) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        ++evals;
        if (f1 < best_f) {
            best_f = f1;
            best_x = x1;
        }
        if (f2 < best_f) {
            best_f = f2;
            best_x = x2;
        }
    }
    return {best_x, best_f, evals, hi - lo <= cfg.tol};
}

struct OptimalParameter {
    double value;      // optimal a, b, sigma or alpha
    double distortion; // objective value at the optimum
    bool converged;
};

namespace detail {

// Default search interval for the family parameter: radii and scales range
// up to 1.5x the 0.999999-quantile of the target radius; the atom weight
// ranges over [0,1].
inline std::pair<double, double> parameter_range(const DistortionQuery& q) {
    if (q.quantiser.variant == QuantiserVariant::sphere_with_atom) return {0.0, 1.0};
    const double r_hi = 1.5 * radial_quantile(q.target, 0.999999);
    if (q.quantiser.variant == QuantiserVariant::sphere_uniform) return {0.0, r_hi};
    return {1.0e-6 * r_hi, r_hi}; // ball radius and normal scale must stay positive
}

inline std::function<double(double)> parameter_objective(const DistortionQuery& q) {
    if (q.quantiser.variant == QuantiserVariant::sphere_with_atom &&
        q.target.variant == RadialVariant::point_mass && q.target.param == 1.0) {
        return [q](double alpha) {
            return mixture_distortion(q.d, q.n, q.s, alpha, q.quantiser.param, q.quad);
        };
    }
    if (q.quantiser.variant == QuantiserVariant::sphere_with_atom) {
        return [q](double alpha) {
            DistortionQuery qq = q;
            qq.quantiser = q.quantiser.with_atom_weight(alpha);
            return expected_distortion(qq);
        };
    }
    return [q](double value) {
        DistortionQuery qq = q;
        qq.quantiser = q.quantiser.with_param(value);
        return expected_distortion(qq);
    };
}

} // namespace detail

// Minimise the expected distortion over the scalar family parameter of the
// query's quantiser (a, b, sigma) or over the atom weight for the mixture.
// A 33-point coarse scan guards against gross multimodality; golden-section
// then runs on each competitive bracket.
inline OptimalParameter optimal_parameter(const DistortionQuery& q, double tol = 1.0e-6,
                                          int max_iter = 200) {
    detail::validate(q);
    const auto [lo, hi] = detail::parameter_range(q);
    const auto objective = detail::parameter_objective(q);

    // Families with an inner radial integral are expensive; run the search
    // at a working tolerance and re-evaluate the winner at full precision.
    const bool costly = q.quantiser.variant == QuantiserVariant::ball_uniform ||
                        q.quantiser.variant == QuantiserVariant::normal_scaled;
    DistortionQuery work = q;
    if (costly) {
        work.quad.rel_tol = std::max(q.quad.rel_tol, 1.0e-6);
        work.quad.abs_tol = std::max(q.quad.abs_tol, 1.0e-10);
    }
    const auto work_objective = detail::parameter_objective(work);

    // the scan only has to rank cells, so it may run at a loose tolerance
    DistortionQuery coarse = q;
    coarse.quad.rel_tol = std::max(q.quad.rel_tol, 1.0e-4);
    coarse.quad.abs_tol = std::max(q.quad.abs_tol, 1.0e-8);
    const auto scan_objective = detail::parameter_objective(coarse);

    constexpr int scan_points = 33;
    std::vector<double> xs(scan_points), fs(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        xs[i] = lo + (hi - lo) * i / double(scan_points - 1);
        fs[i] = scan_objective(xs[i]);
    }
    std::vector<int> minima;
    int scan_best = 0;
    for (int i = 0; i < scan_points; ++i) {
        if (fs[i] < fs[scan_best]) scan_best = i;
        const bool left_ok = i == 0 || fs[i] <= fs[i - 1];
        const bool right_ok = i == scan_points - 1 || fs[i] <= fs[i + 1];
        if (left_ok && right_ok) minima.push_back(i);
    }

    // the scan ranks cells only; the reported optimum always comes from a
    // golden-section run plus a full-precision final evaluation
    OptimalParameter best{xs[scan_best], std::numeric_limits<double>::infinity(), true};
    for (int i : minima) {
        SearchConfig cfg;
        cfg.lo = xs[std::max(0, i - 1)];
        cfg.hi = xs[std::min(scan_points - 1, i + 1)];
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        if (!(cfg.hi > cfg.lo)) continue;
        const SearchResult r = golden_section(work_objective, cfg);
        if (r.f <= best.distortion) best = {r.x, r.f, r.converged};
    }
    if (costly) best.distortion = objective(best.value);
    return best;
}

struct CrossoverResult {
    bool found = false;
    std::uint64_t n_star = 0;
    // scan log: (n, optimised distortion gap D_A - D_B) in evaluation order
    std::vector<std::pair<std::uint64_t, double>> log;
};

// Largest n <= n_hi at which family A (optimised per n) still beats family
// B (optimised per n), assuming a single sign change of the gap in n;
// geometric bisection, with per-family memoisation of the optimisation.
inline CrossoverResult crossover_size(const RadialLaw& target, const QuantiserFamily& family_a,
                                      const QuantiserFamily& family_b, double s,
                                      std::uint64_t n_hi, const QuadratureConfig& quad = {},
                                      double tol = 1.0e-4) {
    if (family_a.variant == family_b.variant && family_a.atom_weight == family_b.atom_weight)
        return {}; // identical families: the gap is identically zero
    if (n_hi < 2) throw std::domain_error("crossover_size: n_hi must be >= 2");

    std::map<std::uint64_t, OptimalParameter> memo_a, memo_b;
    const auto optimised = [&](const QuantiserFamily& fam,
                               std::map<std::uint64_t, OptimalParameter>& memo,
                               std::uint64_t n) {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second.distortion;
        DistortionQuery q{target.dim, n, s, target, fam, quad};
        OptimalParameter opt;
        // warm start from the nearest design size already optimised: the
        // optimal parameter moves slowly in n, so a local bracket suffices
        const auto near = memo.lower_bound(n);
        const OptimalParameter* hint = nullptr;
        if (near != memo.end()) hint = &near->second;
        else if (!memo.empty()) hint = &std::prev(memo.end())->second;
        bool done = false;
        if (hint != nullptr && hint->value > 0.0) {
            const double range_hi = detail::parameter_range(q).second;
            SearchConfig cfg{std::min(0.6 * hint->value, 0.9 * range_hi),
                             std::min(1.6 * hint->value, range_hi), tol, 200};
            if (cfg.hi > cfg.lo) {
                const auto objective = detail::parameter_objective(q);
                const SearchResult r = golden_section(objective, cfg);
                // keep only an interior optimum; a pinned bracket means the
                // hint was stale and the full search must run
                if (r.x > cfg.lo + 2.0 * tol && r.x < cfg.hi - 2.0 * tol) {
                    opt = {r.x, r.f, r.converged};
                    done = true;
                }
            }
        }
        if (!done) opt = optimal_parameter(q, tol);
        memo.emplace(n, opt);
        return opt.distortion;
    };
    CrossoverResult out;
    const auto gap = [&](std::uint64_t n) {
        const double g = optimised(family_a, memo_a, n) - optimised(family_b, memo_b, n);
        out.log.emplace_back(n, g);
        return g;
    };

    // geometric upward scan for a size where A leads; tiny designs can
    // favour B spuriously, so the scan does not stop at n = 2
    std::uint64_t n_lead = 0;
    for (std::uint64_t n = 2; n <= n_hi; n *= 2) {
        if (gap(n) < 0.0) {
            n_lead = n;
            break;
        }
        if (n > n_hi / 2) break;
    }
    if (n_lead == 0) return out;      // A never ahead: no sign change to bracket
    if (gap(n_hi) < 0.0) return out;  // still ahead at the cap: no crossover <= n_hi
    std::uint64_t lo = n_lead, hi = n_hi; // gap(lo) < 0 <= gap(hi)
    while (hi - lo > 1) {
        const std::uint64_t mid =
            std::min(hi - 1, std::max(lo + 1, std::uint64_t(std::sqrt(double(lo) * double(hi)))));
        if (gap(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    out.found = true;
    out.n_star = lo;
    return out;
}

} // namespace sphq
