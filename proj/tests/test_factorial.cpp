#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "sphq/factorial.hpp"

using namespace sphq;

TEST_CASE("factorial distortion closed forms", "[factorial]") {
    CHECK(factorial_distortion(5, 0.0, 2) == 1.0);
    CHECK(factorial_distortion(9, 0.0, 4) == 1.0);
    // d=3: E{V1} = 1/2, so b = 1/2 gives 1 - d b^2 = 1/4
    CHECK(factorial_distortion(3, 0.5, 2) == Catch::Approx(0.25).margin(1e-14));
    CHECK_THROWS_AS(factorial_distortion(3, 0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(factorial_distortion(1, 0.5, 2), std::domain_error);
}

TEST_CASE("factorial optima", "[factorial]") {
    const auto o2 = factorial_optimal(3, 2.0);
    CHECK(o2.b_star == Catch::Approx(0.5).margin(1e-14));
    CHECK(o2.value == Catch::Approx(0.25).margin(1e-13));
    const auto oi = factorial_optimal(4, std::numeric_limits<double>::infinity());
    CHECK(oi.b_star == Catch::Approx(0.25).margin(1e-15));
    CHECK(oi.value == Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-15));
    for (int d : {2, 7, 33})
        CHECK(factorial_optimal(d, std::numeric_limits<double>::infinity()).value ==
              Catch::Approx(std::sqrt(1.0 - 1.0 / d)).margin(1e-15));
    // sqrt(d) b2* tends to sqrt(2/pi) ~ 0.797885
    CHECK(std::sqrt(200.0) * factorial_optimal(200, 2.0).b_star ==
          Catch::Approx(std::sqrt(2.0 / detail::pi)).margin(0.005));
    CHECK_THROWS_AS(factorial_optimal(3, 3.0), std::invalid_argument);
}

TEST_CASE("s=4 optimum is a stationary minimum", "[factorial]") {
    for (int d : {2, 3, 5, 12, 40}) {
        const auto o4 = factorial_optimal(d, 4.0);
        const double b = o4.b_star;
        CHECK(o4.value == Catch::Approx(factorial_distortion(d, b, 4)).margin(1e-13));
        const double h = 1e-5 * std::max(b, 0.1);
        CHECK(factorial_distortion(d, b + h, 4) >= o4.value - 1e-12);
        CHECK(factorial_distortion(d, b - h, 4) >= o4.value - 1e-12);
        // golden-section on the quartic lands on the same point
        const double gr = 0.6180339887498949;
        double lo = 0.0, hi = 1.0;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = factorial_distortion(d, x1, 4), f2 = factorial_distortion(d, x2, 4);
        while (hi - lo > 1e-10) {
            if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = factorial_distortion(d, x1, 4); }
            else { lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = factorial_distortion(d, x2, 4); }
        }
        CHECK(b == Catch::Approx(0.5 * (lo + hi)).margin(1e-7));
    }
}

TEST_CASE("factorial b2* identity and radius gap", "[factorial]") {
    for (int d : {3, 10, 60}) {
        const auto o2 = factorial_optimal(d, 2.0);
        CHECK(o2.value ==
              Catch::Approx(1.0 - d * o2.b_star * o2.b_star).margin(1e-12));
    }
    // |a2* - a4*| with a_j* = sqrt(d) b_j* shrinks monotonically in d
    double prev = 1.0;
    for (int d = 10; d <= 100; d += 5) {
        const double a2 = std::sqrt(double(d)) * factorial_optimal(d, 2.0).b_star;
        const double a4 = std::sqrt(double(d)) * factorial_optimal(d, 4.0).b_star;
        const double gap = std::fabs(a2 - a4);
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
    CHECK(prev < 5.0 / 100.0);
}
