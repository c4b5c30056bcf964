#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <json.hpp>

#include "sphq/quadrature.hpp"
#include "sphq/radial.hpp"
#include "sphq/radial_json.hpp"

using namespace sphq;

TEST_CASE("radial moments, closed forms", "[radial]") {
    CHECK(radial_moment(RadialLaw::point_mass(1.0, 5), 2) == 1.0);
    CHECK(radial_moment(RadialLaw::point_mass(0.7, 4), 3) ==
          Catch::Approx(0.343).epsilon(1e-14));
    CHECK(radial_moment(RadialLaw::ball_power(1.0, 3), 1) == Catch::Approx(0.75).epsilon(1e-14));
    for (int d : {2, 3, 10, 41})
        CHECK(radial_moment(RadialLaw::scaled_chi(1.0, d), 2) ==
              Catch::Approx(1.0).epsilon(1e-13));
    CHECK(radial_moment(RadialLaw::scaled_chi(1.0, 3), 1) ==
          Catch::Approx(0.9213177319235613).epsilon(1e-12));
    // zeroth moment is exactly one
    for (int d : {2, 7}) {
        CHECK(radial_moment(RadialLaw::point_mass(0.3, d), 0) == 1.0);
        CHECK(radial_moment(RadialLaw::ball_power(2.0, d), 0) == 1.0);
        CHECK(radial_moment(RadialLaw::scaled_chi(1.4, d), 0) == 1.0);
    }
    CHECK_THROWS_AS(radial_moment(RadialLaw::point_mass(1.0, 3), -1), std::domain_error);
}

TEST_CASE("scaled chi moment recurrence", "[radial]") {
    // M_{k+2} = sigma^2 (d+k)/d M_k
    for (int d : {2, 5, 24}) {
        for (double sigma : {0.5, 1.0, 2.3}) {
            const auto law = RadialLaw::scaled_chi(sigma, d);
            for (int k = 0; k <= 6; ++k) {
                const double lhs = radial_moment(law, k + 2);
                const double rhs = sigma * sigma * (d + k) / double(d) * radial_moment(law, k);
                CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("densities integrate to one", "[radial]") {
    for (int d : {2, 3, 8, 17}) {
        const auto ball = RadialLaw::ball_power(1.7, d);
        const double mb = detail::adaptive_simpson([&](double r) { return radial_pdf(ball, r); },
                                                   0.0, 1.7, 1e-11, 1e-13, 40);
        CHECK(mb == Catch::Approx(1.0).margin(1e-10));
        const auto chi = RadialLaw::scaled_chi(0.8, d);
        const double mc = detail::adaptive_simpson([&](double r) { return radial_pdf(chi, r); },
                                                   0.0, radial_support_hi(chi), 1e-11, 1e-13, 40);
        CHECK(mc == Catch::Approx(1.0).margin(1e-10));
    }
    CHECK_THROWS_AS(radial_pdf(RadialLaw::point_mass(1.0, 3), 0.5), std::domain_error);
}

TEST_CASE("cdf and quantile are mutually inverse", "[radial]") {
    CHECK(radial_quantile(RadialLaw::ball_power(2.0, 5), 0.5) ==
          Catch::Approx(2.0 * std::pow(0.5, 0.2)).epsilon(1e-14));
    const auto pm = RadialLaw::point_mass(1.3, 4);
    CHECK(radial_cdf(pm, 1.2999) == 0.0);
    CHECK(radial_cdf(pm, 1.3) == 1.0);
    // chi-square identity: cdf of the chi radial law in d = 4 is P(2, 2 rho^2)
    const auto chi4 = RadialLaw::scaled_chi(1.0, 4);
    for (double rho = 0.1; rho < 2.5; rho += 0.2)
        CHECK(radial_cdf(chi4, rho) ==
              Catch::Approx(reg_inc_gamma(2.0, 2.0 * rho * rho)).margin(1e-13));
    for (int d : {2, 6, 13}) {
        for (auto law : {RadialLaw::ball_power(1.5, d), RadialLaw::scaled_chi(1.1, d)}) {
            for (double p = 0.02; p < 1.0; p += 0.07) {
                const double rho = radial_quantile(law, p);
                CHECK(radial_cdf(law, rho) == Catch::Approx(p).margin(1e-10));
            }
        }
    }
    CHECK_THROWS_AS(radial_quantile(RadialLaw::ball_power(1.0, 3), 1.5), std::domain_error);
    CHECK_THROWS_AS(radial_cdf(RadialLaw::ball_power(1.0, 3), -0.1), std::domain_error);
}

TEST_CASE("construction guards", "[radial]") {
    CHECK_THROWS_AS(RadialLaw::point_mass(1.0, 1), std::domain_error);
    CHECK_THROWS_AS(RadialLaw::ball_power(0.0, 3), std::domain_error);
    CHECK_THROWS_AS(RadialLaw::scaled_chi(-1.0, 3), std::domain_error);
    CHECK_THROWS_AS(QuantiserFamily::sphere(-0.5, 3), std::domain_error);
    CHECK_THROWS_AS(QuantiserFamily::sphere_with_atom(1.2, 1.0, 3), std::domain_error);
    CHECK_NOTHROW(QuantiserFamily::sphere(0.0, 2));
}

TEST_CASE("json round trip", "[radial]") {
    const auto laws = {RadialLaw::point_mass(0.9, 6), RadialLaw::ball_power(1.2, 3),
                       RadialLaw::scaled_chi(0.7, 11)};
    for (const auto& law : laws) {
        nlohmann::json j = law;
        const auto back = j.get<RadialLaw>();
        CHECK(back.variant == law.variant);
        CHECK(back.param == law.param);
        CHECK(back.dim == law.dim);
        CHECK(j.contains("variant"));
        CHECK(j.contains("params"));
        CHECK(j.at("d").get<int>() == law.dim);
    }
    const auto fams = {QuantiserFamily::sphere(0.8, 5), QuantiserFamily::ball(1.1, 4),
                       QuantiserFamily::normal(1.3, 9),
                       QuantiserFamily::sphere_with_atom(0.85, 1.0, 10)};
    for (const auto& fam : fams) {
        nlohmann::json j = fam;
        const auto back = j.get<QuantiserFamily>();
        CHECK(back.variant == fam.variant);
        CHECK(back.param == fam.param);
        CHECK(back.atom_weight == fam.atom_weight);
        CHECK(back.dim == fam.dim);
    }
    CHECK_THROWS(nlohmann::json{{"variant", "torus"}, {"params", {}}, {"d", 3}}.get<RadialLaw>());
}

TEST_CASE("atom mixture with unit weight matches the sphere law", "[radial]") {
    const auto atom = QuantiserFamily::sphere_with_atom(1.0, 0.8, 5);
    const auto sphere = QuantiserFamily::sphere(0.8, 5);
    CHECK(atom.component_law().variant == sphere.component_law().variant);
    CHECK(atom.component_law().param == sphere.component_law().param);
    CHECK(atom.atom_weight == 1.0);
}
