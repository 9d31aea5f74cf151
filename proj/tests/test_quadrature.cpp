#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dnls/errors.hpp"
#include "dnls/quadrature.hpp"

using dnls::incomplete_profile_integral;
using dnls::incomplete_profile_integral_full;
using dnls::sech_power_tail_integral;
using dnls::sech_power_tail_integral_full;

namespace {

// Oracle: integral over [0,1] of (1-s^2)^beta ds = B(1/2, beta+1) / 2,
// evaluated through log-gamma, fully independent of the quadrature engine.
double beta_function_oracle(double beta) {
    return 0.5 * std::exp(std::lgamma(0.5) + std::lgamma(beta + 1.0)
                          - std::lgamma(beta + 1.5));
}

// Oracle: composite Simpson in theta after s = sin(theta), doubled until
// successive values agree to 12 digits.
double simpson_theta(double xi, double beta, double s_upper = 1.0) {
    const double a = std::asin(xi);
    const double b = std::asin(s_upper);
    const double expo = 2.0 * beta + 1.0;
    auto f = [expo](double theta) { return std::pow(std::cos(theta), expo); };

    double previous = 0.0;
    for (long n = 64; n <= (1L << 24); n *= 2) {
        const double h = (b - a) / n;
        double sum = f(a) + f(b);
        for (long k = 1; k < n; ++k)
            sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
        const double value = sum * h / 3.0;
        if (n > 64 && std::abs(value - previous) <= 1e-12 * std::max(1.0, std::abs(value)))
            return value;
        previous = value;
    }
    return previous;
}

} // namespace

TEST_CASE("empty interval and full interval") {
    CHECK(incomplete_profile_integral(1.0, 0.4) == 0.0);
    CHECK(incomplete_profile_integral(0.0, 1.0) == Catch::Approx(2.0 / 3.0).margin(1e-14));
}

TEST_CASE("full integral matches the Beta-function identity") {
    for (double beta : {0.2, 0.5, 1.7, 3.0, -0.4, -0.9}) {
        const double expected = beta_function_oracle(beta);
        const double got = incomplete_profile_integral(0.0, beta);
        CAPTURE(beta);
        CHECK(got == Catch::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("interior query matches the Simpson oracle") {
    // The oracle stops at s = 1 - 1e-8; the remainder is bounded by
    // (2(1-s))^beta integrated over the last sliver.
    const double beta = 0.4;
    const double oracle = simpson_theta(0.25, beta, 1.0 - 1e-8);
    const double sliver = std::pow(2.0, beta) * std::pow(1e-8, beta + 1.0) / (beta + 1.0);
    const double got = incomplete_profile_integral(0.25, beta);
    CHECK(std::abs(got - oracle) <= 2e-11 + sliver);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(incomplete_profile_integral(-0.1, 1.0), dnls::domain_error);
    CHECK_THROWS_AS(incomplete_profile_integral(1.1, 1.0), dnls::domain_error);
    CHECK_THROWS_AS(incomplete_profile_integral(0.5, -1.0), dnls::domain_error);
    CHECK_THROWS_AS(incomplete_profile_integral(0.5, -1.0 + 1e-12), dnls::domain_error);
    CHECK_THROWS_AS(sech_power_tail_integral(0.0, 1.0), dnls::domain_error);
    CHECK_THROWS_AS(sech_power_tail_integral(1.0, 1.0), dnls::domain_error);
    CHECK_THROWS_AS(sech_power_tail_integral(0.5, 0.0), dnls::domain_error);
}

TEST_CASE("monotone non-increasing in xi") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> beta_dist(-0.8, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double beta = beta_dist(rng);
        double previous = incomplete_profile_integral(0.0, beta);
        for (int i = 1; i <= 20; ++i) {
            const double value = incomplete_profile_integral(i / 20.0, beta);
            CAPTURE(beta, i);
            CHECK(value <= previous + 1e-13);
            previous = value;
        }
    }
}

TEST_CASE("sech tail: vanishing and closed-antiderivative cases") {
    CHECK(std::abs(sech_power_tail_integral(0.999999, 1.0)) <= 1e-5);
    // beta = 1: antiderivative is tanh, so the tail is 1 - a.
    CHECK(sech_power_tail_integral(0.5, 1.0) == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tail integral equals the incomplete integral at shifted exponent") {
    const double lhs = sech_power_tail_integral(0.25, 1.4);
    const double rhs = incomplete_profile_integral(0.25, 0.4);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-12));

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> a_dist(0.05, 0.95);
    std::uniform_real_distribution<double> beta_dist(0.2, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = a_dist(rng);
        const double beta = beta_dist(rng);
        const double tail = sech_power_tail_integral(a, beta);
        const double direct = incomplete_profile_integral(a, beta - 1.0);
        CAPTURE(a, beta);
        CHECK(std::abs(tail - direct) <= 1e-10);
    }
}

TEST_CASE("reported error estimate bounds the true error") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> xi_dist(0.01, 0.99);
    std::uniform_real_distribution<double> beta_dist(0.25, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double xi = xi_dist(rng);
        const double beta = beta_dist(rng);
        const auto res = incomplete_profile_integral_full(xi, beta);
        const double oracle = simpson_theta(xi, beta);
        CAPTURE(xi, beta, res.value, res.error, oracle);
        CHECK(std::abs(res.value - oracle) <= res.error + 2e-12 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("error estimates are reported") {
    const auto res = incomplete_profile_integral_full(0.3, -0.7);
    CHECK(res.value > 0.0);
    CHECK(res.error >= 0.0);
    CHECK(res.levels >= 1);
}
