#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eoelab/special.hpp"

using namespace eoelab::special;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("ln_gamma matches known values and std::lgamma") {
    CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ln_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ln_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK(ln_gamma(0.5) == doctest::Approx(0.5 * std::log(kPi)).epsilon(1e-14));
    for (double x = 0.5; x <= 100.0; x += 0.37) {
        CHECK(ln_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    }
}

TEST_CASE("ln_beta from gamma identity") {
    CHECK(ln_beta(2.0, 3.0) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-13));
    CHECK(ln_beta(0.5, 0.5) == doctest::Approx(std::log(kPi)).epsilon(1e-13));
}

TEST_CASE("digamma known values and recurrence") {
    const double euler = 0.577215664901532860606512090082402431;
    CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-12));
    CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-12));
    // psi(10) = H_9 - euler
    double h9 = 0.0;
    for (int i = 1; i <= 9; ++i) h9 += 1.0 / i;
    CHECK(digamma(10.0) == doctest::Approx(h9 - euler).epsilon(1e-12));
    for (double x = 0.1; x < 20.0; x += 0.61)
        CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-11));
}

TEST_CASE("trigamma known values and recurrence") {
    CHECK(trigamma(1.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
    CHECK(trigamma(0.5) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-12));
    for (double x = 0.2; x < 15.0; x += 0.53)
        CHECK(trigamma(x + 1.0) == doctest::Approx(trigamma(x) - 1.0 / (x * x)).epsilon(1e-10));
}

TEST_CASE("regularized incomplete gamma") {
    for (double x = 0.05; x < 20.0; x += 0.43) {
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
        CHECK(gamma_p(3.7, x) + gamma_q(3.7, x) == doctest::Approx(1.0).epsilon(1e-13));
    }
    // P(1/2, x^2) = erf(x) for x >= 0
    for (double x = 0.1; x < 4.0; x += 0.17)
        CHECK(gamma_p(0.5, x * x) == doctest::Approx(std::erf(x)).epsilon(1e-12));
    CHECK(gamma_p(2.0, 0.0) == 0.0);
    CHECK(gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("erf and erfc against the standard library") {
    for (double x = -5.0; x <= 5.0; x += 0.11) {
        CHECK(eoelab::special::erf(x) == doctest::Approx(std::erf(x)).epsilon(1e-11));
        CHECK(eoelab::special::erfc(x) == doctest::Approx(std::erfc(x)).epsilon(1e-10));
        CHECK(eoelab::special::erf(x) == doctest::Approx(-eoelab::special::erf(-x)).epsilon(1e-14));
    }
}

TEST_CASE("normal CDF") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(norm_cdf(-1.96) == doctest::Approx(0.0249978951482205).epsilon(1e-10));
    for (double x = -6.0; x <= 6.0; x += 0.23)
        CHECK(norm_cdf(x) == doctest::Approx(0.5 * std::erfc(-x / std::sqrt(2.0))).epsilon(1e-11));
}

TEST_CASE("normal quantile inverts the CDF") {
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    for (double p = 1e-6; p < 1.0; p += 0.0137) {
        const double z = norm_quantile(p);
        CHECK(norm_cdf(z) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(norm_quantile(1e-12) < -6.0);
    CHECK(norm_quantile(1.0 - 1e-12) > 6.0);
}

TEST_CASE("regularized incomplete beta") {
    for (double x = 0.01; x < 1.0; x += 0.07) {
        CHECK(inc_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-13));
        CHECK(inc_beta(2.5, 1.7, x) ==
              doctest::Approx(1.0 - inc_beta(1.7, 2.5, 1.0 - x)).epsilon(1e-12));
        // I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
        CHECK(inc_beta(0.5, 0.5, x) ==
              doctest::Approx(2.0 / kPi * std::asin(std::sqrt(x))).epsilon(1e-12));
    }
    CHECK(inc_beta(3.0, 4.0, 0.0) == 0.0);
    CHECK(inc_beta(3.0, 4.0, 1.0) == 1.0);
}
