#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sphq/distortion.hpp"

using namespace sphq;

namespace {

DistortionQuery sphere_query(int d, std::uint64_t n, double s, double a,
                             double target_radius = 1.0) {
    return {d, n, s, RadialLaw::point_mass(target_radius, d), QuantiserFamily::sphere(a, d), {}};
}

// d = 3 closed forms from the unit-sphere analysis
double d3_s2(double a, double n) { return (1.0 - a) * (1.0 - a) + 4.0 * a / (n + 1.0); }
double d3_s4(double a, double n) {
    return std::pow(1.0 - a, 4.0) +
           8.0 * a * (n * (1.0 - a) * (1.0 - a) + 2.0 + 2.0 * a * a) / ((n + 1.0) * (n + 2.0));
}

} // namespace

TEST_CASE("nu_factor geometry", "[distortion]") {
    CHECK(nu_factor(1.7 + 0.4, 1.7, 0.4) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(nu_factor(1.7 - 0.4, 1.7, 0.4) == Catch::Approx(0.0).margin(1e-14));
    CHECK(nu_factor(std::sqrt(1.7 * 1.7 + 0.4 * 0.4), 1.7, 0.4) ==
          Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("hit probability branches", "[distortion]") {
    const auto sphere = QuantiserFamily::sphere(1.0, 3);
    CHECK(hit_probability(sphere, 1.0, 1.0) == Catch::Approx(0.25).margin(1e-13));
    CHECK(hit_probability(QuantiserFamily::sphere(0.6, 7), 1.0, 0.39) == 0.0);
    CHECK(hit_probability(QuantiserFamily::sphere(0.6, 7), 1.0, 1.6001) == 1.0);
    // r = 0 reduces to the radial c.d.f.
    const auto ball = QuantiserFamily::ball(1.0, 3);
    CHECK(hit_probability(ball, 0.0, 0.5) == Catch::Approx(0.125).epsilon(1e-14));
    CHECK(hit_probability(QuantiserFamily::normal(1.0, 4), 0.0, 0.7) ==
          Catch::Approx(radial_cdf(RadialLaw::scaled_chi(1.0, 4), 0.7)).epsilon(1e-13));
    // atom mixture splits between the sphere term and the origin indicator
    const auto atom = QuantiserFamily::sphere_with_atom(0.6, 1.0, 3);
    CHECK(hit_probability(atom, 1.0, 1.0) == Catch::Approx(0.6 * 0.25 + 0.4).margin(1e-13));
    CHECK(hit_probability(atom, 1.0, 0.5) == Catch::Approx(0.6 * hit_probability(sphere, 1.0, 0.5)).margin(1e-13));
    CHECK_THROWS_AS(hit_probability(sphere, -1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(hit_probability(sphere, 1.0, -0.5), std::domain_error);
}

TEST_CASE("hit probability integrates the ball and chi laws", "[distortion]") {
    // spot value against a dense independent Riemann sum
    const auto ball = QuantiserFamily::ball(1.3, 5);
    const double r = 0.9, t = 0.7;
    const double delta = 2.0;
    long double acc = 0.0;
    const int m = 400000;
    for (int i = 0; i < m; ++i) {
        const double rho = 1.3 * (i + 0.5) / m;
        acc += reg_inc_beta(nu_factor(t, rho, r), delta, delta) *
               radial_pdf(RadialLaw::ball_power(1.3, 5), rho) * (1.3 / m);
    }
    CHECK(hit_probability(ball, r, t) == Catch::Approx(double(acc)).margin(1e-8));
}

TEST_CASE("mean distance cdf basics", "[distortion]") {
    auto q = sphere_query(3, 2, 2.0, 1.0);
    CHECK(mean_distance_cdf(q, 0.0) == 0.0);
    CHECK(mean_distance_cdf(q, 2.0) == 1.0);
    CHECK(mean_distance_cdf(q, 1.0) == Catch::Approx(0.4375).margin(1e-12));
    // nondecreasing in t across families
    for (auto fam : {QuantiserFamily::sphere(0.8, 4), QuantiserFamily::ball(1.1, 4),
                     QuantiserFamily::normal(0.9, 4),
                     QuantiserFamily::sphere_with_atom(0.7, 0.8, 4)}) {
        DistortionQuery qq{4, 16, 2.0, RadialLaw::ball_power(1.0, 4), fam, {}};
        double prev = -1.0;
        for (double t = 0.0; t <= 2.3; t += 0.04) {
            const double cur = mean_distance_cdf(qq, t);
            CHECK(cur >= prev - 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("expected distortion, d3 closed forms vs quadrature", "[distortion]") {
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (std::uint64_t n : {1ULL, 10ULL, 100ULL}) {
            auto q2 = sphere_query(3, n, 2.0, a);
            q2.quad.rel_tol = 1e-10;
            q2.quad.abs_tol = 1e-13;
            CHECK(expected_distortion(q2) == Catch::Approx(d3_s2(a, double(n))).margin(1e-12));
            CHECK(expected_distortion_quadrature(q2) ==
                  Catch::Approx(d3_s2(a, double(n))).margin(1e-8));
            auto q4 = q2;
            q4.s = 4.0;
            CHECK(expected_distortion(q4) == Catch::Approx(d3_s4(a, double(n))).margin(1e-12));
            CHECK(expected_distortion_quadrature(q4) ==
                  Catch::Approx(d3_s4(a, double(n))).margin(1e-8));
        }
    }
}

TEST_CASE("expected distortion reference points", "[distortion]") {
    // all quantiser mass at the origin: distance to the unit sphere is one
    auto q0 = sphere_query(3, 7, 6.0, 0.0);
    CHECK(expected_distortion(q0) == 1.0);
    // independent centred points: E ||U - X||^2 = 1 + a^2 at n = 1
    CHECK(expected_distortion(sphere_query(3, 1, 2.0, 0.5)) ==
          Catch::Approx(1.25).margin(1e-12));
    CHECK_THROWS_AS(expected_distortion(sphere_query(3, 1, -2.0, 0.5)), std::domain_error);
}

TEST_CASE("distortion equals the tail integral of the mean distance cdf", "[distortion]") {
    // internal consistency of the two routes, within 10x the quadrature tolerance
    const auto cases = {
        DistortionQuery{3, 8, 2.0, RadialLaw::point_mass(1.0, 3), QuantiserFamily::sphere(0.7, 3), {}},
        DistortionQuery{5, 12, 1.0, RadialLaw::ball_power(1.0, 5), QuantiserFamily::sphere(0.8, 5), {}},
        DistortionQuery{4, 20, 3.0, RadialLaw::scaled_chi(1.0, 4), QuantiserFamily::ball(1.2, 4), {}},
    };
    for (auto q : cases) {
        q.quad.rel_tol = 1e-8;
        const double direct = expected_distortion_quadrature(q);
        const auto [t_min, t_max] = distance_support(q);
        const double via_cdf =
            std::pow(t_min, q.s) +
            detail::adaptive_simpson(
                [&](double t) {
                    return q.s * std::pow(t, q.s - 1.0) * (1.0 - mean_distance_cdf(q, t));
                },
                t_min, t_max, 1e-9, 1e-12, 40);
        CHECK(direct == Catch::Approx(via_cdf).margin(10.0 * q.quad.rel_tol * direct + 1e-10));
    }
}

TEST_CASE("atom mixture with unit weight reproduces the sphere distortion", "[distortion]") {
    for (int d : {3, 10}) {
        for (double a : {0.5, 0.9}) {
            DistortionQuery qs{d, 25, 4.0, RadialLaw::point_mass(1.0, d),
                               QuantiserFamily::sphere(a, d), {}};
            DistortionQuery qa = qs;
            qa.quantiser = QuantiserFamily::sphere_with_atom(1.0, a, d);
            CHECK(expected_distortion(qa) ==
                  Catch::Approx(expected_distortion(qs)).margin(1e-10));
        }
    }
}

TEST_CASE("scale equivariance", "[distortion]") {
    // scaling all radii by c multiplies the distortion by c^s
    const double c = 1.9;
    DistortionQuery q1{6, 14, 3.0, RadialLaw::ball_power(1.0, 6), QuantiserFamily::ball(0.9, 6), {}};
    DistortionQuery qc{6, 14, 3.0, RadialLaw::ball_power(c, 6),
                       QuantiserFamily::ball(0.9 * c, 6), {}};
    CHECK(expected_distortion(qc) ==
          Catch::Approx(std::pow(c, 3.0) * expected_distortion(q1)).epsilon(1e-7));
    DistortionQuery n1{4, 9, 2.0, RadialLaw::scaled_chi(1.0, 4), QuantiserFamily::normal(1.1, 4), {}};
    DistortionQuery nc{4, 9, 2.0, RadialLaw::scaled_chi(c, 4),
                       QuantiserFamily::normal(1.1 * c, 4), {}};
    CHECK(expected_distortion(nc) ==
          Catch::Approx(c * c * expected_distortion(n1)).epsilon(1e-7));
}

TEST_CASE("mixture distortion", "[distortion]") {
    // alpha = 1 degenerates to the plain sphere quantiser
    CHECK(mixture_distortion(3, 9, 2.0, 1.0, 0.8) == Catch::Approx(0.36).margin(1e-9));
    for (int d : {3, 10}) {
        DistortionQuery q{d, 20, 10.0, RadialLaw::point_mass(1.0, d),
                          QuantiserFamily::sphere(0.95, d), {}};
        CHECK(mixture_distortion(d, 20, 10.0, 1.0, 0.95) ==
              Catch::Approx(expected_distortion(q)).epsilon(1e-7));
    }
    // alpha = 0 puts every point at the origin
    for (double a : {0.2, 1.0})
        for (double s : {1.0, 4.0}) CHECK(mixture_distortion(8, 5, s, 0.0, a) == 1.0);
    CHECK_THROWS_AS(mixture_distortion(3, 9, 2.0, -0.1, 0.8), std::domain_error);
    CHECK_THROWS_AS(mixture_distortion(3, 9, 2.0, 1.1, 0.8), std::domain_error);
}

TEST_CASE("distance quantile inverts the cdf", "[distortion]") {
    auto q = sphere_query(3, 2, 2.0, 1.0);
    CHECK(distance_quantile(q, 0.4375) == Catch::Approx(1.0).margin(1e-7));
    CHECK(distance_quantile(q, 0.0) == 0.0);
    CHECK(distance_quantile(q, 1.0) == 2.0);
    auto qq = sphere_query(5, 30, 2.0, 0.8);
    const auto [t_min, t_max] = distance_support(qq);
    CHECK(distance_quantile(qq, 1e-9) == Catch::Approx(t_min).margin(1e-3));
    double prev = 0.0;
    for (double g = 0.05; g < 1.0; g += 0.09) {
        const double t = distance_quantile(qq, g);
        CHECK(t >= prev);
        CHECK(mean_distance_cdf(qq, t) == Catch::Approx(g).margin(1e-8));
        prev = t;
    }
}
