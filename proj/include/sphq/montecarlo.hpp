#pragma once

// Monte-Carlo side of the library: reproducible sampling of random
// quantisers and targets, empirical distortion with CLT / Hoeffding
// diagnostics, and the distributional check of the beta-minimum
// representation of squared nearest distances.
//
// All sampling is driven by a counter-seeded generator with independent
// substreams, so identical seeds give bit-identical results regardless of
// the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "sphq/common.hpp"
#include "sphq/distortion.hpp"
#include "sphq/radial.hpp"

namespace sphq {
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64 from (seed, substream).
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t substream = 0) {
        std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (substream + 1));
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on (0,1]; never returns 0 so logs are safe
    double uniform() { return (double(next() >> 11) + 1.0) * 0x1.0p-53; }

    // Marsaglia polar method with a cached spare
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        have_spare_ = true;
        return u * factor;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rng

namespace detail {

// direction uniform on the unit sphere, written into out[0..d)
inline void sample_direction(rng::Stream& g, int d, double* out) {
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (int j = 0; j < d; ++j) {
            out[j] = g.normal();
            norm2 += out[j] * out[j];
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < d; ++j) out[j] *= inv;
}

// one draw of ||U|| x direction for the given radial law
inline void sample_radial_point(rng::Stream& g, const RadialLaw& law, double* out) {
    const int d = law.dim;
    switch (law.variant) {
    case RadialVariant::point_mass:
        sample_direction(g, d, out);
        for (int j = 0; j < d; ++j) out[j] *= law.param;
        return;
    case RadialVariant::ball_power: {
        sample_direction(g, d, out);
        const double radius = law.param * std::pow(g.uniform(), 1.0 / d);
        for (int j = 0; j < d; ++j) out[j] *= radius;
        return;
    }
    case RadialVariant::scaled_chi: {
        const double scale = law.param / std::sqrt(double(d));
        for (int j = 0; j < d; ++j) out[j] = scale * g.normal();
        return;
    }
    }
}

// pairwise (cascaded) summation of v[lo..hi)
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline unsigned worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace detail

// n x d row-major sample of i.i.d. points from the quantiser family.
inline std::vector<double> sample_quantiser(const QuantiserFamily& family, std::uint64_t n,
                                            std::uint64_t seed) {
    if (n < 1) throw std::domain_error("sample_quantiser: n must be >= 1");
    const int d = family.dim;
    std::vector<double> points(n * std::size_t(d));
    rng::Stream g(seed);
    const RadialLaw comp = family.component_law();
    for (std::uint64_t i = 0; i < n; ++i) {
        double* row = points.data() + i * d;
        detail::sample_radial_point(g, comp, row);
        if (family.atom_weight < 1.0 && g.uniform() > family.atom_weight)
            for (int j = 0; j < d; ++j) row[j] = 0.0;
    }
    return points;
}

struct McReport {
    double estimate;
    double std_error;
    std::uint64_t n_samples;
    double hoeffding_bound; // 2 exp(-2 N alpha^2) for compact targets, else 1
    std::uint64_t seed;
};

// Monte-Carlo (mu,s)-distortion of a fixed point set: mean of d^s(U_i, X_n)
// over N target draws, with the CLT standard error and, for compact
// targets, the Hoeffding bound on deviations of alpha * CR^s.
inline McReport mc_distortion(const std::vector<double>& points, const RadialLaw& target,
                              double s, std::uint64_t n_samples, std::uint64_t seed,
                              double hoeffding_alpha = 0.01) {
    if (n_samples < 2) throw std::domain_error("mc_distortion: needs at least two samples");
    const int d = target.dim;
    const std::size_t n_points = points.size() / d;
    if (n_points == 0 || points.size() != n_points * std::size_t(d))
        throw std::domain_error("mc_distortion: point set shape does not match d");

    constexpr std::uint64_t chunk = 8192; // fixed substream granularity
    const std::uint64_t n_chunks = (n_samples + chunk - 1) / chunk;
    std::vector<double> values(n_samples);

    const auto run_chunk = [&](std::uint64_t c) {
        rng::Stream g(seed, c + 1);
        std::vector<double> u(d);
        const std::uint64_t lo = c * chunk, hi = std::min(n_samples, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            detail::sample_radial_point(g, target, u.data());
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < n_points; ++p) {
                const double* row = points.data() + p * d;
                double dist2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double diff = u[j] - row[j];
                    dist2 += diff * diff;
                }
                best = std::min(best, dist2);
            }
            values[i] = std::pow(best, 0.5 * s);
        }
    };

    const unsigned workers = std::min<std::uint64_t>(detail::worker_count(), n_chunks);
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    const double nd = double(n_samples);
    const double mean = detail::pairwise_sum(values, 0, values.size()) / nd;
    for (auto& v : values) v = (v - mean) * (v - mean);
    const double var = detail::pairwise_sum(values, 0, values.size()) / (nd - 1.0);
    const bool compact = target.variant != RadialVariant::scaled_chi;
    const double hoeffding =
        compact ? std::min(1.0, 2.0 * std::exp(-2.0 * nd * hoeffding_alpha * hoeffding_alpha))
                : 1.0;
    return {mean, std::sqrt(std::max(var, 0.0) / nd), n_samples, hoeffding, seed};
}

struct BetaMinReport {
    double ks_statistic;
    double ks_critical; // asymptotic two-sample value at the 1% level
    bool passed;
    bool skipped; // true when n_samples < 1000 (asymptotics unreliable)
    double mean_geometric;
    double se_geometric;
    double mean_beta;
    double se_beta;
    std::uint64_t seed;
};

// Samples d^2(u, R_n) two ways -- geometrically, and through the
// representation (r-a)^2 + 4 a r min_i beta_i with beta_i ~
// Beta(delta,delta) -- and compares the two samples with a
// Kolmogorov-Smirnov test at the 1% level.
inline BetaMinReport beta_min_check(double r, double a, std::uint64_t n, int d,
                                    std::uint64_t n_samples, std::uint64_t seed) {
    if (d < 2) throw std::domain_error("beta_min_check: dimension must be >= 2");
    if (!(r >= 0.0) || !(a >= 0.0))
        throw std::domain_error("beta_min_check: radii must be >= 0");
    if (n < 1 || n_samples < 2) throw std::domain_error("beta_min_check: n, N must be sensible");

    std::vector<double> geo(n_samples), rep(n_samples);
    {
        rng::Stream g(seed, 0);
        std::vector<double> x(d);
        for (std::uint64_t i = 0; i < n_samples; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::uint64_t p = 0; p < n; ++p) {
                detail::sample_direction(g, d, x.data());
                // u = (r, 0, ..., 0), points on the sphere of radius a
                double dist2 = detail::sqr(a * x[0] - r);
                for (int j = 1; j < d; ++j) dist2 += detail::sqr(a * x[j]);
                best = std::min(best, dist2);
            }
            geo[i] = best;
        }
    }
    {
        rng::Stream g(seed, 1);
        std::vector<double> x(d);
        for (std::uint64_t i = 0; i < n_samples; ++i) {
            double min_beta = std::numeric_limits<double>::infinity();
            for (std::uint64_t p = 0; p < n; ++p) {
                // (1 - Z_1)/2 with Z_1 the first coordinate of a uniform
                // direction is Beta(delta, delta)
                detail::sample_direction(g, d, x.data());
                min_beta = std::min(min_beta, 0.5 * (1.0 - x[0]));
            }
            rep[i] = detail::sqr(r - a) + 4.0 * a * r * min_beta;
        }
    }

    BetaMinReport out{};
    out.seed = seed;
    const double nd = double(n_samples);
    out.mean_geometric = detail::pairwise_sum(geo, 0, geo.size()) / nd;
    out.mean_beta = detail::pairwise_sum(rep, 0, rep.size()) / nd;
    double var_g = 0.0, var_b = 0.0;
    for (double v : geo) var_g += detail::sqr(v - out.mean_geometric);
    for (double v : rep) var_b += detail::sqr(v - out.mean_beta);
    out.se_geometric = std::sqrt(var_g / (nd - 1.0) / nd);
    out.se_beta = std::sqrt(var_b / (nd - 1.0) / nd);

    std::vector<double> sg = geo, sr = rep;
    std::sort(sg.begin(), sg.end());
    std::sort(sr.begin(), sr.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sg.size() || j < sr.size()) {
        // advance through ties on both sides before comparing the e.c.d.f.s
        double v;
        if (i < sg.size() && j < sr.size())
            v = std::min(sg[i], sr[j]);
        else
            v = i < sg.size() ? sg[i] : sr[j];
        while (i < sg.size() && sg[i] <= v) ++i;
        while (j < sr.size() && sr[j] <= v) ++j;
        ks = std::max(ks, std::fabs(double(i) / nd - double(j) / nd));
    }
    out.ks_statistic = ks;
    // c(0.01) = sqrt(-ln(0.005)/2) ~ 1.62762
    out.ks_critical = 1.6276236115189503 * std::sqrt(2.0 / nd);
    out.skipped = n_samples < 1000;
    out.passed = out.skipped || ks < out.ks_critical;
    return out;
}

} // namespace sphq
