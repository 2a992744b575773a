#include <doctest.h>

#include <cmath>
#include <string>

#include "isoplan/activations.hpp"
#include "isoplan/errors.hpp"
#include "isoplan/special.hpp"

using namespace isoplan;

namespace {

void check_moments(const GaussianMoments& got, double m_phi, double m_phi2, double m_dphi2,
                   double tol) {
    CHECK(std::abs(got.m_phi - m_phi) <= tol);
    CHECK(std::abs(got.m_phi2 - m_phi2) <= tol);
    CHECK(std::abs(got.m_dphi2 - m_dphi2) <= tol);
}

}  // namespace

TEST_CASE("pointwise values and kink conventions") {
    CHECK(Activation::relu()(-2.0) == 0.0);
    CHECK(Activation::relu().derivative(0.0) == 1.0);
    CHECK(Activation::leaky_relu(0.25)(-2.0) == -0.5);
    CHECK(Activation::hard_tanh()(3.0) == 1.0);
    CHECK(Activation::hard_tanh().derivative(1.0) == 1.0);
    CHECK(Activation::hard_tanh().derivative(1.5) == 0.0);
    CHECK(Activation::sigmoid()(-800.0) >= 0.0);
    CHECK(Activation::sigmoid()(800.0) == 1.0);
    CHECK(Activation::selu().derivative(0.0) == doctest::Approx(kSeluLambda));
    CHECK(Activation::selu()(-1.0) == doctest::Approx(kSeluLambda * kSeluBeta * std::expm1(-1.0)));
}

TEST_CASE("names round-trip through from_name") {
    for (const char* n : {"linear", "relu", "leaky_relu", "hardtanh", "tanh", "sigmoid", "selu"}) {
        CHECK(Activation::from_name(n).name() == n);
    }
    CHECK(Activation::from_name("ReLU").kind() == ActivationKind::ReLU);
    CHECK_THROWS_AS(Activation::from_name("swish"), ContractError);
    CHECK_THROWS_AS(Activation::leaky_relu(1.5), ContractError);
}

TEST_CASE("closed forms agree with quadrature") {
    for (const char* n : {"linear", "relu", "leaky_relu", "hardtanh", "selu"}) {
        for (double q : {0.1, 0.5, 1.0, 4.0, 10.0, 200.0}) {
            CAPTURE(n);
            CAPTURE(q);
            const auto act = Activation::from_name(n, 0.05);
            const auto a = moments_closed(act, q);
            const auto b = moments_quadrature(act, q);
            check_moments(a, b.m_phi, b.m_phi2, b.m_dphi2, 1e-8 * std::max(1.0, q));
        }
    }
    for (double q : {0.1, 1.0, 10.0}) {
        CHECK(std::abs(moments_quadrature(Activation::sigmoid(), q).m_phi - 0.5) < 1e-12);
    }
}

TEST_CASE("leaky ReLU formula interpolates between ReLU and linear") {
    for (double alpha : {0.0, 0.05, 0.25, 1.0}) {
        const auto m = moments_closed(Activation::leaky_relu(alpha), 2.0);
        CHECK(std::abs(m.m_phi - (1 - alpha) * std::sqrt(2.0 / (2 * kPi))) < 1e-10);
        CHECK(std::abs(m.m_phi2 - (1 + alpha * alpha)) < 1e-10);
        CHECK(std::abs(m.m_dphi2 - (1 + alpha * alpha) / 2) < 1e-10);
    }
    const auto relu = moments_closed(Activation::relu(), 2.0);
    const auto leaky0 = moments_closed(Activation::leaky_relu(0.0), 2.0);
    CHECK(relu.m_phi2 == leaky0.m_phi2);
    const auto lin = moments_closed(Activation::linear(), 2.0);
    CHECK(lin.m_phi2 == doctest::Approx(2.0));
    CHECK(lin.m_dphi2 == 1.0);
}

TEST_CASE("moments against high-precision quadrature") {
    // mpmath, 30 digits.
    struct Ref {
        const char* name;
        double q, m_phi, m_phi2, m_dphi2;
    };
    const Ref refs[] = {
        {"tanh", 0.5, 0.0, 0.27367630793673890902, 0.59242579337179639398},
        {"tanh", 2.0, 0.0, 0.51997574566394862353, 0.34950829774660281379},
        {"hardtanh", 0.5, 0.0, 0.37109585481484521366, 0.84270079294971486934},
        {"hardtanh", 2.0, 0.0, 0.64171729887760174359, 0.52049987781304653768},
        {"sigmoid", 0.5, 0.5, 0.27537663200636023832, 0.051362517040704711621},
        {"sigmoid", 2.0, 0.5, 0.31841907698418472725, 0.037026612085737274624},
        {"selu", 0.5, -0.041430000033197206115, 0.57921619810416621401, 1.2127981619668978286},
        {"selu", 2.0, 0.089612083763960683777, 1.722508397220268413, 0.9466892277654012021},
    };
    for (const auto& r : refs) {
        CAPTURE(r.name);
        CAPTURE(r.q);
        check_moments(moments(Activation::from_name(r.name), r.q), r.m_phi, r.m_phi2, r.m_dphi2,
                      1e-12);
    }
}

TEST_CASE("SELU keeps unit variance at its fixed point") {
    const auto m = moments(Activation::selu(), 1.0);
    CHECK(std::abs(m.m_phi) < 1e-8);
    CHECK(std::abs(m.m_phi2 - 1.0) < 1e-8);
}

TEST_CASE("hard tanh unit-variance mode freezes the moments") {
    const auto act = Activation::hard_tanh(HardTanhMoments::UnitVariance);
    const auto at1 = moments_closed(Activation::hard_tanh(), 1.0);
    const auto m = moments_closed(act, 7.0);
    CHECK(m.m_dphi2 == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))));
    CHECK(m.m_dphi2 == doctest::Approx(at1.m_dphi2));
    REQUIRE(act.constant_slope_moment().has_value());
    CHECK(!Activation::hard_tanh().constant_slope_moment().has_value());
}

TEST_CASE("capabilities") {
    CHECK_THROWS_AS(moments_closed(Activation::tanh(), 1.0), CapabilityError);
    const auto custom = Activation::custom(
        "softsign", [](double x) { return x / (1 + std::abs(x)); },
        [](double x) { return 1 / ((1 + std::abs(x)) * (1 + std::abs(x))); }, {0.0}, true);
    CHECK_THROWS_AS(moments_closed(custom, 1.0), CapabilityError);
    const auto m = moments(custom, 1.0);
    CHECK(m.m_phi == 0.0);
    CHECK(m.m_dphi2 > 0.0);
    CHECK(*Activation::relu().constant_slope_moment() == 0.5);
    CHECK(*Activation::leaky_relu(0.25).constant_slope_moment() == doctest::Approx(0.53125));
}

TEST_CASE("q = 0 gives point values") {
    const auto m = moments(Activation::sigmoid(), 0.0);
    CHECK(m.m_phi == 0.5);
    CHECK(m.m_phi2 == 0.25);
    CHECK(m.m_dphi2 == 0.0625);
}
