#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "standout/abtest.hpp"
#include "standout/depthlaw.hpp"
#include "standout/errors.hpp"
#include "standout/firststop.hpp"
#include "standout/gaussmath.hpp"
#include "testutil.hpp"

using namespace standout;
using doctest::Approx;

namespace {

struct Setup {
    Environment env;
    PolicyTable table;
    explicit Setup(const EnvironmentParams& p) : env(p), table(optimal_table(env)) {}
};

double closed_sr(const Setup& s, double delta) {
    return sr_curve(s.env, s.table, std::vector<double>{delta}, ClosedFormN2{})[0];
}

double closed_lr(const Setup& s, double delta) {
    return lr_curve(s.env, s.table, std::vector<double>{delta}, ClosedFormN2{})[0].depth;
}

// E[1{tau = 2} eta_1] / sigma_eta^2 by adaptive Simpson over the continuation interval.
double sr_prime_quadrature(const Setup& s) {
    const FirstStopReport rep = classify_first_stop(s.env, s.table);
    const double sd = s.env.sigma_eta();
    const double centre = s.env.m0() + s.env.alpha(1);
    auto f = [&](double x) {
        const double eta = x - centre;
        return eta * std_normal_pdf(eta / sd) / sd;
    };
    return testutil::simpson(f, rep.s1_minus, rep.s1_plus, 1e-13) / s.env.sigma_eta2();
}

}  // namespace

TEST_CASE("baseline short-run and long-run depth") {
    const Setup s(testutil::baseline());
    CHECK(std::abs(expected_depth(s.env, s.table, 0.0, ClosedFormN2{}) - 1.6054) < 0.002);
    CHECK(std::abs(closed_sr(s, 0.05) - 1.5994) < 0.002);
    CHECK(std::abs(closed_lr(s, 0.05) - 1.6296) < 0.002);
    CHECK(std::abs(sr_derivative_at_zero(s.env, s.table, ClosedFormN2{}) + 0.0958) < 0.003);
    CHECK(closed_lr(s, 0.0) == expected_depth(s.env, s.table, s.env.m0(), ClosedFormN2{}));
}

TEST_CASE("variant with a better outside option") {
    const Setup s(testutil::baseline_xb(0.3));
    CHECK(std::abs(expected_depth(s.env, s.table, 0.0, ClosedFormN2{}) - 1.4065) < 0.002);
    CHECK(std::abs(closed_sr(s, 0.05) - 1.4101) < 0.002);
    CHECK(std::abs(closed_lr(s, 0.05) - 1.4452) < 0.002);
    CHECK(std::abs(sr_derivative_at_zero(s.env, s.table, ClosedFormN2{}) - 0.0907) < 0.003);
}

TEST_CASE("sign disagreement between short and long run") {
    const Setup base(testutil::baseline());
    const ABReport r = run_abtest(base.env, base.table, std::vector<double>{0.05}, ClosedFormN2{});
    CHECK(r.sr[0] < r.baseline);
    CHECK(r.lr[0] > r.baseline);
    const Setup var(testutil::baseline_xb(0.3));
    const ABReport q = run_abtest(var.env, var.table, std::vector<double>{0.05}, ClosedFormN2{});
    CHECK(q.sr[0] > q.baseline);
    CHECK(q.lr[0] > q.baseline);
}

TEST_CASE("analytic derivative matches quadrature and finite differences") {
    for (double xb : {0.0, 0.3, -0.4}) {
        const Setup s(testutil::baseline_xb(xb));
        const double analytic = sr_derivative_at_zero(s.env, s.table, ClosedFormN2{});
        CHECK(std::abs(analytic - sr_prime_quadrature(s)) < 1e-9);
        const double h = 1e-4;
        CHECK(std::abs(analytic - (closed_sr(s, h) - closed_sr(s, -h)) / (2 * h)) < 1e-6);
    }
}

TEST_CASE("score estimator against common-random-number finite differences") {
    const Setup s(testutil::baseline());
    const MonteCarlo mc{10000000, 17};
    const double score = sr_derivative_at_zero(s.env, s.table, mc);
    const auto sr = sr_curve(s.env, s.table, std::vector<double>{-0.02, 0.02}, mc);
    CHECK(std::abs(score - (sr[1] - sr[0]) / 0.04) < 0.005);
}

TEST_CASE("tails and errors") {
    const Setup s(testutil::baseline());
    CHECK(std::abs(expected_depth(s.env, s.table, -1e6, ClosedFormN2{}) - 1.0) < 1e-6);
    CHECK(std::abs(closed_sr(s, 50.0) - 1.0) < 5e-3);
    CHECK(std::abs(closed_sr(s, -50.0) - 1.0) < 5e-3);
    EnvironmentParams p;
    p.N = 3;
    const Setup three(p);
    CHECK_THROWS_AS(expected_depth(three.env, three.table, 0.0, ClosedFormN2{}), DomainError);
    CHECK_NOTHROW(expected_depth(three.env, three.table, 0.0, MonteCarlo{1000, 0}));
}

TEST_CASE("long-run corner is flagged") {
    const Setup s(testutil::baseline());
    const auto lr = lr_curve(s.env, s.table, std::vector<double>{-10.0, 0.0}, ClosedFormN2{});
    CHECK(lr[0].corner);
    CHECK(lr[0].depth == 0.0);
    CHECK_FALSE(lr[1].corner);
}

TEST_CASE("Monte Carlo depth agrees with the closed form") {
    const Setup s(testutil::baseline());
    const std::size_t n = 400000;
    const double mc = expected_depth(s.env, s.table, 0.0, MonteCarlo{n, 5});
    const double cf = expected_depth(s.env, s.table, 0.0, ClosedFormN2{});
    const double se = std::sqrt((cf - 1) * (2 - cf) / n);
    CHECK(std::abs(mc - cf) < 3 * se);
}

TEST_CASE("property: long-run depth weakly increasing, short-run tails return to one") {
    testutil::Gen gen(51);
    for (int k = 0; k < 20; ++k) {
        EnvironmentParams p = gen.environment(2, 2);
        const Setup s(p);
        std::vector<double> grid;
        for (int i = 0; i <= 80; ++i) grid.push_back(-2.0 + 0.05 * i);
        const auto lr = lr_curve(s.env, s.table, grid, ClosedFormN2{});
        for (std::size_t i = 1; i < lr.size(); ++i)
            if (!lr[i - 1].corner) CHECK(lr[i].depth >= lr[i - 1].depth - 1e-12);
        CHECK(std::abs(closed_sr(s, 60.0) - 1.0) < 5e-3);
        CHECK(std::abs(closed_sr(s, -60.0) - 1.0) < 5e-3);
    }
}

TEST_CASE("property: translation identity") {
    testutil::Gen gen(52);
    for (int k = 0; k < 20; ++k) {
        const EnvironmentParams p = gen.environment(2, 2);
        const double a = gen.uniform(-2, 2), mu = p.m0 + gen.uniform(-1, 1);
        EnvironmentParams q = p;
        q.m0 += a;
        q.x_b += a;
        const Setup s(p), t(q);
        CHECK(expected_depth(t.env, t.table, mu + a, ClosedFormN2{}) ==
              Approx(expected_depth(s.env, s.table, mu, ClosedFormN2{})).epsilon(1e-9));
    }
    for (int k = 0; k < 3; ++k) {
        const EnvironmentParams p = gen.environment(3, 6);
        const double a = gen.uniform(-2, 2);
        EnvironmentParams q = p;
        q.m0 += a;
        q.x_b += a;
        const Setup s(p), t(q);
        const std::size_t n = 100000;
        const double x = expected_depth(s.env, s.table, p.m0, MonteCarlo{n, 7});
        const double y = expected_depth(t.env, t.table, q.m0, MonteCarlo{n, 7});
        CHECK(std::abs(x - y) < 3 * std::sqrt(p.N * p.N / 4.0 / n));
    }
}

TEST_CASE("property: lowering the outside option never shortens a session") {
    testutil::Gen gen(53);
    for (int k = 0; k < 6; ++k) {
        const EnvironmentParams p = gen.environment(2, 7);
        const Setup s(p);
        const Environment lower = s.env.with_outside_option(p.x_b - gen.uniform(0.01, 1.0));
        for (std::uint64_t i = 0; i < 50000; ++i) {
            const SessionDraws d = draw_session(s.env, {}, 99, i);
            CHECK(run_session(lower, s.table, d).depth >= run_session(s.env, s.table, d).depth);
        }
    }
}
