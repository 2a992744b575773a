#include <doctest.h>

#include <cmath>
#include <numeric>

#include "isoplan/errors.hpp"
#include "isoplan/quadrature.hpp"
#include "isoplan/special.hpp"

using namespace isoplan;

TEST_CASE("erfcx matches high-precision values") {
    struct Ref {
        double x, value;
    };
    // 30-digit evaluations of exp(x^2) erfc(x).
    const Ref refs[] = {
        {-3.0, 16205.988853999586625},  {-0.5, 1.9523604891825570933},
        {0.0, 1.0},                     {0.5, 0.61569034419292587487},
        {3.9, 0.14031418160068973568},  {4.0, 0.13699945762506138989},
        {10.0, 0.056140992743822585858}, {100.0, 0.0056416137829894329036},
        {1e4, 0.000056418958072680841152},
    };
    for (const auto& r : refs) {
        CAPTURE(r.x);
        CHECK(std::abs(erfcx(r.x) - r.value) <= 1e-14 * r.value);
    }
}

TEST_CASE("erfcx stays finite where the naive product breaks down") {
    CHECK(std::isfinite(erfcx(30.0)));
    CHECK(erfcx(1e300) > 0.0);
    CHECK(erfcx(27.0) == doctest::Approx(1.0 / (27.0 * kSqrtPi)).epsilon(1e-3));
}

TEST_CASE("Gauss-Hermite rule integrates polynomials exactly") {
    const auto& rule = gauss_hermite_rule(201);
    REQUIRE(rule.nodes.size() == 201);
    const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    // E[z^2] = 1, E[z^4] = 3, E[z^6] = 15
    double m2 = 0, m4 = 0, m6 = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z2 = rule.nodes[i] * rule.nodes[i];
        m2 += rule.weights[i] * z2;
        m4 += rule.weights[i] * z2 * z2;
        m6 += rule.weights[i] * z2 * z2 * z2;
    }
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(rule.nodes[100] == 0.0);
}

TEST_CASE("gaussian_moment") {
    SUBCASE("second moment of the identity is q") {
        for (double q : {0.01, 1.0, 37.0}) {
            CHECK(gaussian_moment([](double x) { return x * x; }, q) ==
                  doctest::Approx(q).epsilon(1e-13));
        }
    }
    SUBCASE("kinked integrand, both rules") {
        const auto relu = [](double x) { return x > 0 ? x : 0.0; };
        const double kink[] = {0.0};
        const double exact = std::sqrt(2.0 / (2.0 * kPi));
        CHECK(std::abs(gaussian_moment(relu, 2.0, kink) - exact) < 1e-14);
        QuadratureOptions gh;
        gh.rule = QuadratureRule::GaussHermite;
        // Fixed Gauss-Hermite only converges algebraically across a kink.
        const double gh_error = std::abs(gaussian_moment(relu, 2.0, kink, gh) - exact);
        CHECK(gh_error < 1e-2);
        CHECK(gh_error > 1e-8);
    }
    SUBCASE("q = 0 evaluates at the origin") {
        CHECK(gaussian_moment([](double x) { return std::cos(x); }, 0.0) == 1.0);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(gaussian_moment([](double x) { return x; }, -1.0), DomainError);
        CHECK_THROWS_AS(gaussian_moment([](double x) { return x; }, NAN), DomainError);
        CHECK_THROWS_AS(gaussian_moment([](double x) { return 1.0 / (x - x); }, 1.0), DomainError);
    }
}
