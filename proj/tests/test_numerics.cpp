#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "glrdose/numerics.hpp"
#include "oracles.hpp"

using namespace glrdose;

TEST_CASE("reg_inc_beta closed forms") {
    for (double t : {0.0, 0.01, 0.1, 0.3, 0.5, 0.77, 0.99, 1.0}) {
        CAPTURE(t);
        CHECK(reg_inc_beta({1, 1}, t) == doctest::Approx(t).epsilon(1e-13));
        CHECK(reg_inc_beta({2, 1}, t) == doctest::Approx(t * t).epsilon(1e-13));
        CHECK(reg_inc_beta({1, 4}, t) == doctest::Approx(1.0 - std::pow(1.0 - t, 4)).epsilon(1e-13));
        CHECK(reg_inc_beta({2, 3}, t) ==
              doctest::Approx(6 * t * t - 8 * t * t * t + 3 * t * t * t * t).epsilon(1e-12));
        CHECK(reg_inc_beta({0.5, 0.5}, t) == doctest::Approx(2.0 / M_PI * std::asin(std::sqrt(t))).epsilon(1e-12));
    }
    CHECK(reg_inc_beta({2, 3}, 0.3) == doctest::Approx(0.3483).epsilon(1e-12));
}

TEST_CASE("reg_inc_beta against independent oracles") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int a = 1; a <= 12; ++a) {
        for (int b = 1; b <= 12; ++b) {
            for (int i = 0; i < 5; ++i) {
                const double t = unit(rng);
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(t);
                CHECK(reg_inc_beta({double(a), double(b)}, t) ==
                      doctest::Approx(oracle::beta_cdf_binomial_sum(a, b, t)).epsilon(1e-11));
            }
        }
    }
    for (int i = 0; i < 40; ++i) {
        const double a = 2.0 + 8.0 * unit(rng), b = 2.0 + 8.0 * unit(rng), t = unit(rng);
        CHECK(reg_inc_beta({a, b}, t) == doctest::Approx(oracle::beta_cdf_quadrature(a, b, t)).epsilon(1e-8));
    }
}

TEST_CASE("reg_inc_beta symmetry and monotonicity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double a = 0.2 + 20.0 * unit(rng), b = 0.2 + 20.0 * unit(rng), t = unit(rng);
        CHECK(reg_inc_beta({a, b}, t) + reg_inc_beta({b, a}, 1.0 - t) == doctest::Approx(1.0).epsilon(1e-12));
        const double u = std::min(1.0, t + 0.01);
        CHECK(reg_inc_beta({a, b}, u) >= reg_inc_beta({a, b}, t));
    }
}

TEST_CASE("reg_inc_beta rejects bad input") {
    CHECK_THROWS_AS(reg_inc_beta({0.0, 1.0}, 0.5), std::domain_error);
    CHECK_THROWS_AS(reg_inc_beta({1.0, -1.0}, 0.5), std::domain_error);
    CHECK_THROWS_AS(reg_inc_beta({1.0, 1.0}, 1.5), std::domain_error);
}

TEST_CASE("beta posterior tails") {
    const TargetRate phi{0.25};
    // 1 - I_0.25(3, 2) = 1 - (4 t^3 - 3 t^4)
    const double t = 0.25;
    const double closed = 1.0 - (4 * t * t * t - 3 * t * t * t * t);
    CHECK(beta_tail_probability({3, 2}, phi) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(beta_tail_probability({3, 2}, phi) == doctest::Approx(0.9492).epsilon(1e-4));
    CHECK_FALSE(beta_tail_exceeds({3, 2}, phi, kBayesEliminationThreshold));
    // 1 - t^4
    CHECK(beta_tail_probability({3, 3}, phi) == doctest::Approx(1.0 - std::pow(t, 4)).epsilon(1e-13));
    CHECK(beta_tail_exceeds({3, 3}, phi, kBayesEliminationThreshold));
    CHECK(beta_interval_mass({1, 4}, 0.2, 0.3) == doctest::Approx(std::pow(0.8, 4) - std::pow(0.7, 4)));
}

TEST_CASE("bisect") {
    const double root = bisect([](double v) { return v * v - 2.0; }, 0.0, 2.0, 1e-12);
    CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
    // Step function: lands within tol of the jump.
    const double jump = bisect([](double v) { return v < 0.3 ? -1.0 : 1.0; }, 0.0, 1.0, 1e-10);
    CHECK(std::abs(jump - 0.3) <= 1e-10);
    CHECK(bisect([](double v) { return v; }, 0.0, 1.0, 1e-8) == 0.0);

    CHECK_THROWS_AS(bisect([](double v) { return v + 1.0; }, 0.0, 1.0, 1e-8), std::domain_error);
    CHECK_THROWS_AS(bisect([](double v) { return v; }, 1.0, 0.0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(bisect([](double v) { return v; }, -1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bisect([](double v) { return v - 0.3; }, 0.0, 1.0, 1e-300, 5), std::runtime_error);
}
