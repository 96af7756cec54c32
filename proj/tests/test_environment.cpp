#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "standout/config.hpp"
#include "standout/environment.hpp"
#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"
#include "testutil.hpp"

using namespace standout;
using doctest::Approx;

constexpr double kQ23 = 0.43072729929545749021;
constexpr double kAlpha1 = 0.30457019417398562520;  // q(2/3) / sqrt(2)
constexpr double kBaselineSlack = 0.55591830714428570064;

TEST_CASE("derived constants for the two-rank baseline") {
    const DerivedConstants d = derive(testutil::baseline());
    CHECK(d.rho == 0.5);
    CHECK(d.sigma_z == Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(d.sigma_eta2 == 0.5);
    CHECK(std::abs(d.q[0] - kQ23) < 1e-12);
    CHECK(std::abs(d.q[1] + kQ23) < 1e-12);
    CHECK(std::abs(d.alpha[0] - kAlpha1) < 1e-12);
    CHECK(std::abs(d.alpha[1] + kAlpha1) < 1e-12);
}

TEST_CASE("single rank sits at the median") {
    EnvironmentParams p;
    p.N = 1;
    const DerivedConstants d = derive(p);
    CHECK(std::abs(d.q[0]) < 1e-15);
    CHECK(std::abs(d.alpha[0]) < 1e-15);
}

TEST_CASE("blom quantiles") {
    EnvironmentParams p;
    p.N = 5;
    p.quantile_rule = QuantileRule::blom;
    const DerivedConstants d = derive(p);
    for (int i = 1; i <= 5; ++i)
        CHECK(std_normal_cdf(d.q[i - 1]) == Approx(1.0 - (i - 0.375) / 5.25).epsilon(1e-12));
    CHECK(std::abs(d.q[2]) < 1e-15);
}

TEST_CASE("parameter validation") {
    for (auto mutate : {+[](EnvironmentParams& p) { p.N = 0; }, +[](EnvironmentParams& p) { p.sigma_x2 = 0; },
                        +[](EnvironmentParams& p) { p.sigma_e2 = -1; }, +[](EnvironmentParams& p) { p.v0 = 0; },
                        +[](EnvironmentParams& p) { p.c = 0; }, +[](EnvironmentParams& p) { p.m0 = NAN; }}) {
        EnvironmentParams p;
        mutate(p);
        CHECK_THROWS_AS(derive(p), DomainError);
        CHECK_THROWS_AS(Environment{p}, DomainError);
    }
}

TEST_CASE("interior slack") {
    CHECK(std::abs(interior_condition_slack(testutil::baseline()) - kBaselineSlack) < 1e-12);
    EnvironmentParams p;
    p.x_b = 1e6;
    CHECK(interior_condition_slack(p) < 0.0);
    CHECK(interior_condition_slack(p) == Approx(-p.c));
    p = {};
    p.v0 = 1e6;
    CHECK(interior_condition_slack(p) > 0.0);
    EnvironmentParams corner;
    corner.c = 5.0;
    CHECK_FALSE(Environment(corner).is_interior());
    CHECK_THROWS_AS(require_interior(Environment(corner), "test"), NonInteriorError);
    CHECK_NOTHROW(require_interior(Environment(testutil::baseline()), "test"));
}

TEST_CASE("environment accessors and variants") {
    const Environment env(testutil::baseline());
    CHECK(env.N() == 2);
    CHECK(env.sigma_eta2() == 0.5);
    CHECK(env.posterior_variance(0) == 1.0);
    CHECK(env.posterior_variance(1) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(env.predictive_sd(0) == Approx(std::sqrt(1.5)).epsilon(1e-15));
    CHECK(env.with_outside_option(0.3).x_b() == 0.3);
    CHECK(env.with_prior_mean(2.0).m0() == 2.0);
    CHECK(env.with_cost(0.2).c() == 0.2);
    CHECK(env.with_cost(0.2).alphas() == env.alphas());
}

TEST_CASE("primitives constructor") {
    Primitives p;
    p.alpha = {0.3, 0.1, 0.0};
    const Environment env(p);
    CHECK(env.N() == 3);
    CHECK(env.alpha(2) == 0.1);
    p.alpha = {0.3, 0.3};
    CHECK_THROWS_AS(Environment{p}, DomainError);
    p.alpha = {};
    CHECK_THROWS_AS(Environment{p}, DomainError);
}

TEST_CASE("quantile rule names") {
    CHECK(to_string(QuantileRule::blom) == "blom");
    CHECK(quantile_rule_from_string("midpoint") == QuantileRule::midpoint);
    CHECK_THROWS_AS(quantile_rule_from_string("exact"), ConfigError);
}

TEST_CASE("json config round trip and errors") {
    EnvironmentParams p;
    p.N = 4;
    p.c = 0.07;
    p.quantile_rule = QuantileRule::blom;
    const EnvironmentParams back = params_from_json(params_to_json(p));
    CHECK(back.N == 4);
    CHECK(back.c == 0.07);
    CHECK(back.quantile_rule == QuantileRule::blom);
    CHECK(params_from_json(nlohmann::json::object()).N == 2);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"N", "two"}}), ConfigError);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"c", -1.0}}), ConfigError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/config.json"), ConfigError);

    const auto cfg = config_from_json(nlohmann::json{{"alpha", {0.3, 0.1, 0.0}}, {"sigma_eta2", 1.0}, {"x_b", -0.5}});
    REQUIRE(cfg.primitives);
    const Environment env = cfg.build();
    CHECK(env.N() == 3);
    CHECK(env.x_b() == -0.5);
    CHECK(config_from_json(cfg.to_json()).build().alphas() == env.alphas());
}

TEST_CASE("property: alpha strictly decreasing and antisymmetric") {
    testutil::Gen gen(5);
    for (int k = 0; k < 300; ++k) {
        EnvironmentParams p;
        p.N = gen.integer(1, 40);
        p.sigma_x2 = gen.uniform(0.1, 5.0);
        p.sigma_e2 = gen.uniform(0.1, 5.0);
        p.quantile_rule = gen.integer(0, 1) ? QuantileRule::blom : QuantileRule::midpoint;
        const DerivedConstants d = derive(p);
        for (int i = 1; i < p.N; ++i) CHECK(d.alpha[i] < d.alpha[i - 1]);
        double sum = 0.0;
        for (double a : d.alpha) sum += a;
        CHECK(std::abs(sum) < 1e-9);
        if (p.quantile_rule == QuantileRule::midpoint && p.N % 2 == 0)
            for (int i = 0; i < p.N; ++i) CHECK(std::abs(d.alpha[i] + d.alpha[p.N - 1 - i]) < 1e-9);
    }
}

TEST_CASE("property: reliability path drives residual noise to zero") {
    EnvironmentParams p;
    p.N = 6;
    p.sigma_x2 = 1.7;
    double prev = INFINITY;
    for (double rho : {0.5, 0.9, 0.99, 0.999, 0.99999}) {
        p.sigma_e2 = p.sigma_x2 * (1 - rho) / rho;
        const DerivedConstants d = derive(p);
        CHECK(d.rho == Approx(rho).epsilon(1e-12));
        CHECK(d.sigma_eta2 < prev);
        prev = d.sigma_eta2;
        if (rho > 0.9999)
            for (int i = 0; i < p.N; ++i) CHECK(std::abs(d.alpha[i] - std::sqrt(p.sigma_x2) * d.q[i]) < 1e-4);
    }
    CHECK(prev < 1e-4);
}
