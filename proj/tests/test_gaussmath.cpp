#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"
#include "standout/rng.hpp"
#include "testutil.hpp"

using namespace standout;
using doctest::Approx;

// Reference values from 40-digit evaluations of the defining formulas.
constexpr double kPhiPdf25 = 0.01752830049356853736;
constexpr double kQ23 = 0.43072729929545749021;
constexpr double kGm5 = 5.00000005346165533833;
constexpr double kGinv5 = -4.99999994653832933680;
constexpr double kUpside021 = 0.39559311480261205919;

TEST_CASE("normal density") {
    CHECK(std_normal_pdf(0.0) == Approx(0.3989422804).epsilon(1e-10));
    CHECK(std_normal_pdf(1.0) == std_normal_pdf(-1.0));
    CHECK(std::abs(std_normal_pdf(2.5) - kPhiPdf25) < 1e-12);
}

TEST_CASE("normal cdf") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std::abs(std_normal_cdf(40.0) - 1.0) < 1e-15);
    CHECK(std::abs(std_normal_cdf(kQ23) - 2.0 / 3.0) < 1e-9);
    CHECK(std_normal_cdf(-30.0) == Approx(4.906713927148187e-198).epsilon(1e-12));
}

TEST_CASE("cdf matches a long double reference across the line") {
    for (double d = -37.0; d <= 8.0; d += 0.173) {
        const double ref = testutil::phi_oracle(d);
        CHECK(std::abs(std_normal_cdf(d) - ref) <= 1e-12 * std::max(ref, 1e-300) + 1e-300);
    }
}

TEST_CASE("normal quantile") {
    CHECK(std_normal_quantile(0.5) == Approx(0.0).epsilon(1e-15));
    const double q = std_normal_quantile(2.0 / 3.0);
    const double bisected = testutil::bisect([](double d) { return std_normal_cdf(d) - 2.0 / 3.0; }, -5.0, 5.0);
    CHECK(std::abs(q - bisected) < 1e-12);
    CHECK(std::abs(q - kQ23) < 1e-12);
    CHECK(std_normal_quantile(1.0 / 3.0) == Approx(-q).epsilon(1e-14));
    CHECK_THROWS_AS(std_normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(1.0), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(-0.1), DomainError);
}

TEST_CASE("quantile inverts the cdf deep in both tails") {
    for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 0.01, 0.3, 0.7, 0.99, 1 - 1e-12}) {
        const double d = std_normal_quantile(p);
        CHECK(std_normal_cdf(d) == Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("option value g") {
    CHECK(g(0.0) == Approx(0.3989422804).epsilon(1e-10));
    CHECK(g(10.0) > 0.0);
    CHECK(g(10.0) < 1e-20);
    CHECK(std::abs(g(-5.0) - kGm5) < 1e-12);
}

TEST_CASE("g inverse") {
    CHECK(std::abs(g_inverse(0.3989422804014327)) < 1e-12);
    const double d = g_inverse(5.0);
    const double bisected = testutil::bisect([](double x) { return g(x) - 5.0; }, -10.0, 0.0);
    CHECK(std::abs(d - bisected) < 1e-9);
    CHECK(std::abs(d - kGinv5) < 1e-12);
    CHECK(g_inverse(g(1.7)) == Approx(1.7).epsilon(1e-9));
    CHECK_THROWS_AS(g_inverse(0.0), DomainError);
    CHECK_THROWS_AS(g_inverse(-1.0), DomainError);
    CHECK(std::isfinite(g_inverse(1e-200)));
}

TEST_CASE("gaussian upside") {
    CHECK(gaussian_upside(0.7, 1.0, 0.7) == Approx(kInvSqrt2Pi).epsilon(1e-14));
    CHECK(std::abs(gaussian_upside(10.0, 1.0, 0.0) - 10.0) < 1e-8);
    CHECK(std::abs(gaussian_upside(0.0, 2.0, 1.0) - kUpside021) < 1e-13);
    CHECK_THROWS_AS(gaussian_upside(0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("gaussian upside agrees with Monte Carlo") {
    RandomStream rng(11, 0);
    const std::size_t n = 10'000'000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::max(0.0, 2.0 * rng.normal() - 1.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - gaussian_upside(0.0, 2.0, 1.0)) < 3.0 * se);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const auto& rule = gauss_legendre(64);
    REQUIRE(rule.nodes.size() == 64);
    double w = 0.0, x2 = 0.0, x126 = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
        w += rule.weights[i];
        x2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        x126 += rule.weights[i] * std::pow(rule.nodes[i], 126);
    }
    CHECK(w == Approx(2.0).epsilon(1e-14));
    CHECK(x2 == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(x126 == Approx(2.0 / 127.0).epsilon(1e-12));
    CHECK(&gauss_legendre(64) == &rule);
}

TEST_CASE("property: g strictly decreasing") {
    testutil::Gen gen(1);
    for (int i = 0; i < 2000; ++i) {
        double a = gen.uniform(-8, 8), b = gen.uniform(-8, 8);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        CHECK(g(a) > g(b));
    }
}

TEST_CASE("property: g inverse round trip on [-8, 8]") {
    testutil::Gen gen(2);
    for (int i = 0; i < 2000; ++i) {
        const double d = gen.uniform(-8, 8);
        CHECK(std::abs(g_inverse(g(d)) - d) < 1e-9);
    }
}

TEST_CASE("property: upside ordering and bounds") {
    testutil::Gen gen(3);
    for (int i = 0; i < 2000; ++i) {
        const double m = gen.uniform(-5, 5), s = gen.uniform(0.05, 4), a = gen.uniform(-8, 8), b = gen.uniform(-8, 8);
        const double ua = gaussian_upside(m, s, a), ub = gaussian_upside(m, s, b);
        CHECK(ua >= 0.0);
        CHECK(ua >= m - a - 1e-12);
        if (std::abs(a - b) > 1e-9 && std::max(ua, ub) > 1e-250) {
            if (a < b) CHECK(ua > ub);
            else CHECK(ua < ub);
        }
    }
}
