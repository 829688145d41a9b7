#include "doctest.h"

#include <numbers>
#include <random>

#include "bubblelab/params.hpp"
#include "bubblelab/quadrature.hpp"
#include "oracles.hpp"

using namespace bubblelab;

TEST_CASE("gamma relation holds for monoatomic and diatomic constants") {
    PhysicalParams p;
    p.c_g = 3.0;
    p.R_spec = 2.0;
    p.gamma = 5.0 / 3.0;
    CHECK_NOTHROW(validate_params(p));
    p.c_g = 5.0;
    p.R_spec = 2.0;
    p.gamma = 7.0 / 5.0;
    CHECK_NOTHROW(validate_params(p));
    CHECK(with_derived_gamma(p).gamma == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("validation reports the first violated field") {
    PhysicalParams p;
    p.sigma = 0.0;
    CHECK_THROWS_WITH_AS(validate_params(p), "sigma must be positive",
                         ValidationError);
    p.sigma = 1.0;
    p.gamma = 1.9;
    CHECK_THROWS_AS(validate_params(p), ValidationError);
    p.gamma = 5.0 / 3.0;
    p.T_inf = -1.0;
    CHECK_THROWS_AS(validate_params(p), ValidationError);
    p.T_inf = 1.0;
    p.sigma_bar = 0.0;  // zero external tension is admissible
    CHECK_NOTHROW(validate_params(p));
}

TEST_CASE("modified volume and sentinel") {
    const auto mv = MassVolumePair::from_mass_volume(1.0, 1.0);
    CHECK(mv.V_bar == doctest::Approx(3.0 / (4.0 * std::numbers::pi))
                          .epsilon(1e-15));
    CHECK_FALSE(mv.infinite_volume());
    const auto inf = MassVolumePair::from_mass_volume(
        1.0, std::numeric_limits<double>::infinity());
    CHECK(inf.infinite_volume());
    CHECK_THROWS_AS(MassVolumePair::from_mass_volume(0.0, 1.0),
                    ValidationError);
}

TEST_CASE("gauss quadrature basics") {
    CHECK_THROWS_AS(gauss_quadrature(1), ValidationError);
    const auto q2 = gauss_quadrature(2);
    CHECK(integrate(q2, [](double) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-15));
    const auto q16 = gauss_quadrature(16);
    CHECK(integrate(q16, [](double y) { return y * y; }) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("nodes are interior and y^2 is reproduced") {
    for (int Q : {2, 7, 16, 64, 257}) {
        const auto rule = gauss_quadrature(Q);
        CHECK(rule.nodes.front() > 0.0);
        CHECK(rule.nodes.back() < 1.0);
        for (double w : rule.weights) CHECK(w > 0.0);
        const double v = integrate(rule, [](double y) { return y * y; });
        CHECK(std::abs(v - 1.0 / 3.0) <= 1e-14);
    }
}

TEST_CASE("first-eigenfunction normalization integrand at Q=64") {
    // 4*pi * int_0^1 [sin(pi y)^2/(2 pi y^2)] y^2 dy = 1
    const auto rule = gauss_quadrature(64);
    auto integrand = [](double y) {
        const double s = std::sin(std::numbers::pi * y);
        return s * s / (2.0 * std::numbers::pi * y * y);
    };
    const double got = ball_integrate(rule, integrand);
    CHECK(std::abs(got - 1.0) <= 1e-12);
    const double ref = oracles::adaptive_simpson(
        [&](double y) {
            return 4.0 * std::numbers::pi * y * y * integrand(y);
        },
        1e-12, 1.0, 1e-14);
    CHECK(std::abs(got - ref) <= 1e-12);
}

TEST_CASE("property: exact for random polynomials of degree <= 2Q-1") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int Q : {2, 5, 16, 40}) {
        const auto rule = gauss_quadrature(Q);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> coeff(2 * Q);
            double exact = 0.0;
            for (int k = 0; k < 2 * Q; ++k) {
                coeff[k] = u(rng);
                exact += coeff[k] / (k + 1.0);  // int_0^1 y^k dy
            }
            const double got = integrate(rule, [&](double y) {
                double acc = 0.0;
                for (int k = 2 * Q - 1; k >= 0; --k) acc = acc * y + coeff[k];
                return acc;
            });
            CHECK(std::abs(got - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
        }
    }
}
