#pragma once

// Quadrature plumbing shared by the exact engine and the extreme-value
// approximations: an adaptive Simpson rule with a depth limit, and
// Gauss-Legendre rules on a fixed node ladder that are refined until two
// successive node counts agree.

#include <array>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <vector>

#include "sphq/common.hpp"

namespace sphq {

struct QuadratureConfig {
    double rel_tol = 1.0e-8;
    double abs_tol = 1.0e-12;
    int max_depth = 40;
    int radial_nodes = 257; // node-count ceiling for the radial ladders
};

namespace detail {

struct GlRule {
    std::vector<double> node;   // on (-1,1)
    std::vector<double> weight;
};

// Legendre nodes/weights by Newton iteration on P_n.
inline GlRule make_gl_rule(int n) {
    GlRule rule;
    rule.node.resize(n);
    rule.weight.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1.0e-15) break;
        }
        rule.node[i] = -x;
        rule.node[n - 1 - i] = x;
        rule.weight[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weight[n - 1 - i] = rule.weight[i];
    }
    return rule;
}

inline constexpr std::array<int, 7> gl_ladder_counts = {17, 33, 65, 129, 257, 513, 1025};

inline const GlRule& gl_rule(int idx) {
    static std::array<GlRule, 7> rules;
    static std::array<std::once_flag, 7> flags;
    std::call_once(flags[idx], [idx] { rules[idx] = make_gl_rule(gl_ladder_counts[idx]); });
    return rules[idx];
}

template <class F>
double gl_apply(const F& f, double lo, double hi, int idx) {
    const GlRule& r = gl_rule(idx);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.node.size(); ++i) sum += r.weight[i] * f(c + h * r.node[i]);
    return h * sum;
}

template <class F>
double gl_refined_impl(const F& f, double lo, double hi, double rel_tol, double abs_tol,
                       int cap_nodes, int depth) {
    if (!(hi > lo)) return 0.0;
    double prev = gl_apply(f, lo, hi, 0);
    for (int idx = 1; idx < int(gl_ladder_counts.size()); ++idx) {
        const double cur = gl_apply(f, lo, hi, idx);
        if (std::fabs(cur - prev) <= rel_tol * std::fabs(cur) + abs_tol) return cur;
        prev = cur;
        if (gl_ladder_counts[idx] >= cap_nodes) break;
    }
    if (depth >= 10) {
        std::ostringstream msg;
        msg << "gl_refined: node ladder did not converge on [" << lo << ", " << hi << "]";
        throw numerical_error(msg.str());
    }
    const double mid = 0.5 * (lo + hi);
    return gl_refined_impl(f, lo, mid, rel_tol, 0.5 * abs_tol, cap_nodes, depth + 1) +
           gl_refined_impl(f, mid, hi, rel_tol, 0.5 * abs_tol, cap_nodes, depth + 1);
}

// Gauss-Legendre on [lo,hi], laddering the node count until two successive
// rules agree to tolerance; falls back to interval bisection for kinks.
template <class F>
double gl_refined(const F& f, double lo, double hi, double rel_tol, double abs_tol,
                  int cap_nodes = 257) {
    return gl_refined_impl(f, lo, hi, rel_tol, abs_tol, cap_nodes, 0);
}

template <class F>
double adaptive_simpson_impl(const F& f, double a, double fa, double b, double fb, double c,
                             double fc, double whole, double rel_tol, double abs_tol,
                             double abs_floor, int depth, int max_depth) {
    const double lm = 0.5 * (a + c), rm = 0.5 * (c + b);
    const double flm = f(lm), frm = f(rm);
    const double h = b - a;
    const double left = (h / 12.0) * (fa + 4.0 * flm + fc);
    const double right = (h / 12.0) * (fc + 4.0 * frm + fb);
    const double s2 = left + right;
    const double err = s2 - whole;
    if (std::fabs(err) <= 15.0 * (abs_tol + rel_tol * std::fabs(s2)))
        return s2 + err / 15.0;
    // a subinterval whose whole value sits below the segment budget cannot
    // matter to that accuracy; stop refining it
    if (std::fabs(s2) <= abs_floor && std::fabs(err) <= 15.0 * abs_floor) return s2;
    if (depth >= max_depth) {
        std::ostringstream msg;
        msg << "adaptive_simpson: depth " << max_depth << " exhausted on [" << a << ", " << b
            << "], estimate " << s2 << ", error estimate " << std::fabs(err) / 15.0;
        throw numerical_error(msg.str());
    }
    return adaptive_simpson_impl(f, a, fa, c, fc, lm, flm, left, rel_tol, 0.5 * abs_tol,
                                 abs_floor, depth + 1, max_depth) +
           adaptive_simpson_impl(f, c, fc, b, fb, rm, frm, right, rel_tol, 0.5 * abs_tol,
                                 abs_floor, depth + 1, max_depth);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol, double abs_tol,
                        int max_depth) {
    if (!(b > a)) return 0.0;
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double whole = ((b - a) / 6.0) * (fa + 4.0 * fc + fb);
    return adaptive_simpson_impl(f, a, fa, b, fb, c, fc, whole, rel_tol, abs_tol, abs_tol, 0,
                                 max_depth);
}

} // namespace detail
} // namespace sphq
