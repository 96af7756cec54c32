#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "standout/depthlaw.hpp"
#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"
#include "standout/policy.hpp"
#include "testutil.hpp"

using namespace standout;
using doctest::Approx;

constexpr double kKappa0Myopic = 1.23770843710758244281;
constexpr double kKappa1Myopic = 0.77791630634926334385;
constexpr double kKappaInf = 0.49925229233759828939;

// Independent backward induction in the lead coordinate with adaptive Simpson for every
// expectation: D_t(l) = -c + s g((l - a)/s) + E[max(0, D_{t+1}(Psi(l, xi)))].
struct GapOracle {
    const Environment& env;

    double operator()(int t, double l) const {
        const int N = env.N();
        const double s = env.predictive_sd(t);
        const double a = env.alpha(t + 1);
        double value = -env.c() + s * g((l - a) / s);
        if (t + 1 >= N) return value;
        const double v = env.posterior_variance(t);
        const double w = v / (v + env.sigma_eta2());
        auto f = [&](double xi) {
            const double psi = std::max(l, a + xi) - w * xi;
            return std::max(0.0, (*this)(t + 1, psi)) * std_normal_pdf(xi / s) / s;
        };
        const double kink = l - a;
        const double lo = -9.0 * s, hi = 9.0 * s;
        const double k = std::clamp(kink, lo, hi);
        return value + testutil::simpson(f, lo, k, 1e-11) + testutil::simpson(f, k, hi, 1e-11);
    }

    double root(int t) const {
        const double s = env.predictive_sd(t);
        return testutil::bisect([&](double l) { return (*this)(t, l); }, env.alpha(t + 1) - 8 * s,
                                env.alpha(t + 1) + 8 * s, 60);
    }
};

TEST_CASE("myopic thresholds") {
    const Environment env(testutil::baseline());
    const PolicyTable t = myopic_table(env);
    CHECK(t.kind == PolicyKind::myopic);
    CHECK(std::abs(t.kappa[0] - kKappa0Myopic) < 1e-10);
    CHECK(std::abs(t.kappa[1] - kKappa1Myopic) < 1e-10);
    CHECK(std::abs(t.kappa_inf - kKappaInf) < 1e-10);
    CHECK(t.reservation[0] == t.kappa[0] + env.alpha(1));
    const double s = std::sqrt(1.5);
    const double oracle = s * testutil::bisect([&](double d) { return g(d) - 0.1 / s; }, -5.0, 5.0);
    CHECK(std::abs(t.kappa[0] - oracle) < 1e-9);
}

TEST_CASE("limit threshold is zero when c equals phi(0)") {
    Primitives p;
    p.alpha = {0.5, 0.0};
    p.sigma_eta2 = 1.0;
    p.v0 = 1.0;
    p.c = kInvSqrt2Pi;
    CHECK(std::abs(kappa_limit(Environment(p))) < 1e-12);
}

TEST_CASE("myopic thresholds decrease towards the limit") {
    EnvironmentParams p;
    p.N = 10001;
    const Environment env(p);
    double prev = std::numeric_limits<double>::infinity();
    for (int t = 0; t <= 10000; t += 7) {
        const double k = myopic_kappa(env, t);
        CHECK(k < prev);
        CHECK(k > kappa_limit(env));
        prev = k;
    }
    // The surcharge decays like 1/t: sigma*_t - sigma_eta is about sigma_eta / (2t).
    const double gap4 = myopic_kappa(env, 10000) - kappa_limit(env);
    const double gap5 = myopic_kappa(env, 100000) - kappa_limit(env);
    CHECK(gap4 < 1e-4);
    CHECK(gap4 / gap5 == Approx(10.0).epsilon(1e-3));
    CHECK(myopic_kappa(env, 1000000) - kappa_limit(env) < 1e-6);
}

TEST_CASE("corner environments are refused") {
    EnvironmentParams p;
    p.c = 3.0;
    const Environment env(p);
    CHECK_THROWS_AS(myopic_table(env), NonInteriorError);
    CHECK_THROWS_AS(optimal_table(env), NonInteriorError);
}

TEST_CASE("optimal thresholds on the two-rank baseline") {
    const Environment env(testutil::baseline());
    const PolicyTable opt = optimal_table(env);
    const PolicyTable myo = myopic_table(env);
    CHECK(opt.kind == PolicyKind::optimal);
    CHECK(std::abs(opt.kappa[1] - myo.kappa[1]) < 1e-8);
    CHECK(opt.kappa[0] >= myo.kappa[0] - 1e-8);
    const GapOracle oracle{env};
    CHECK(std::abs(opt.reservation[0] - oracle.root(0)) < 1e-7);
}

TEST_CASE("optimal thresholds match the independent oracle on longer lists") {
    EnvironmentParams p;
    p.N = 3;
    p.v0 = 3.0;
    p.c = 0.04;
    p.x_b = -0.8;
    for (double v0 : {0.5, 3.0, 20.0}) {
        p.v0 = v0;
        const Environment env(p);
        const PolicyTable opt = optimal_table(env);
        const GapOracle oracle{env};
        for (int t = 0; t < 3; ++t) CHECK(std::abs(opt.reservation[t] - oracle.root(t)) < 1e-6);
        CHECK(opt.kappa[0] >= myopic_kappa(env, 0) - 1e-8);
    }
}

TEST_CASE("single rank") {
    EnvironmentParams p;
    p.N = 1;
    const Environment env(p);
    CHECK(std::abs(optimal_table(env).kappa[0] - myopic_table(env).kappa[0]) < 1e-8);
}

TEST_CASE("stop decisions") {
    const Environment env(testutil::baseline());
    const PolicyTable t = myopic_table(env);
    BeliefState s = initial_state(env);
    s.L = t.reservation[0];
    CHECK(should_stop(s, t));
    s.L = t.reservation[0] - 0.01;
    CHECK_FALSE(should_stop(s, t));
    s.t = 2;
    s.L = -100.0;
    CHECK(should_stop(s, t));
    CHECK(t.reservation_at(2) == -std::numeric_limits<double>::infinity());
    CHECK(to_string(PolicyKind::optimal) == "optimal");
}

TEST_CASE("baseline expected depth from the optimal table") {
    const Environment env(testutil::baseline());
    const PolicyTable t = optimal_table(env);
    const auto paths = simulate_sessions(env, t, MuSpec{0.0}, 200000, 3);
    double sum = 0.0, sq = 0.0;
    for (const auto& p : paths) {
        sum += p.depth;
        sq += p.depth * p.depth;
    }
    const double n = static_cast<double>(paths.size());
    const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.6054) < 3.0 * se + 5e-4);
}

TEST_CASE("property: gap grids are decreasing and vanish at the reservation level") {
    testutil::Gen gen(21);
    for (int k = 0; k < 8; ++k) {
        const Environment env(gen.environment(2, 8));
        const OptimalSolution sol = solve_optimal(env);
        for (int t = 0; t < env.N(); ++t) {
            const auto& gg = sol.gap[t];
            CHECK(gg.lead(gg.values.size() - 1) == Approx(sol.table.reservation[t]).epsilon(1e-12));
            CHECK(std::abs(gg.values.back()) < 1e-9);
            bool decreasing = true;
            for (std::size_t i = 1; i < gg.values.size(); ++i) decreasing = decreasing && gg.values[i] < gg.values[i - 1];
            CHECK(decreasing);
            CHECK(gg.values.front() > 0.0);
        }
        CHECK(std::abs(sol.table.kappa[env.N() - 1] - myopic_kappa(env, env.N() - 1)) < 1e-8);
        for (int t = 0; t < env.N(); ++t) CHECK(sol.table.kappa[t] >= myopic_kappa(env, t) - 1e-8);
    }
}

TEST_CASE("property: optimal thresholds ignore the prior mean and the outside option") {
    testutil::Gen gen(22);
    for (int k = 0; k < 6; ++k) {
        const EnvironmentParams p = gen.environment(2, 7);
        const PolicyTable base = optimal_table(Environment(p));
        EnvironmentParams q = p;
        q.x_b -= gen.uniform(0.0, 1.0);
        EnvironmentParams r = p;
        r.m0 += gen.uniform(-1.0, 1.0);
        for (const auto& other : {q, r}) {
            const Environment e(other);
            if (!e.is_interior()) continue;
            const PolicyTable t = optimal_table(e);
            for (int i = 0; i < p.N; ++i) CHECK(std::abs(t.kappa[i] - base.kappa[i]) < 1e-9);
        }
    }
}

TEST_CASE("property: thresholds scale with the primitives") {
    testutil::Gen gen(23);
    for (int k = 0; k < 4; ++k) {
        const Environment e(gen.environment(2, 6));
        Primitives p = e.primitives();
        for (double& a : p.alpha) a *= 2.0;
        p.sigma_eta2 *= 4.0;
        p.v0 *= 4.0;
        p.m0 *= 2.0;
        p.x_b *= 2.0;
        p.c *= 2.0;
        const Environment f(p);
        const PolicyTable a = optimal_table(e), b = optimal_table(f);
        for (int t = 0; t < e.N(); ++t) {
            CHECK(b.kappa[t] == Approx(2.0 * a.kappa[t]).epsilon(1e-12));
            CHECK(myopic_kappa(f, t) == Approx(2.0 * myopic_kappa(e, t)).epsilon(1e-12));
        }
    }
}
