#include "standout/abtest.hpp"

#include "standout/depthlaw.hpp"
#include "standout/errors.hpp"
#include "standout/firststop.hpp"
#include "standout/gaussmath.hpp"

namespace standout {

namespace {

void require_n2(const Environment& env) {
    if (env.N() != 2) throw DomainError("closed-form depth path needs N = 2");
}

}  // namespace

double expected_depth(const Environment& env, const PolicyTable& table, double mu, const DepthMethod& method) {
    require_interior(env, "expected_depth");
    if (std::holds_alternative<ClosedFormN2>(method)) {
        require_n2(env);
        return depth_distribution_conditional(env, table, mu).mean();
    }
    const auto& mc = std::get<MonteCarlo>(method);
    double sum = 0.0;
    for (std::size_t k = 0; k < mc.n; ++k)
        sum += run_session(env, table, draw_session(env, MuSpec{mu}, mc.seed, k)).depth;
    return sum / static_cast<double>(mc.n);
}

std::vector<double> sr_curve(const Environment& env, const PolicyTable& table, std::span<const double> deltas,
                             const DepthMethod& method) {
    std::vector<double> out;
    out.reserve(deltas.size());
    for (double d : deltas) out.push_back(expected_depth(env, table, env.m0() + d, method));
    return out;
}

std::vector<LongRunPoint> lr_curve(const Environment& env, const PolicyTable& table,
                                   std::span<const double> deltas, const DepthMethod& method) {
    std::vector<LongRunPoint> out;
    out.reserve(deltas.size());
    for (double d : deltas) {
        const Environment shifted = env.with_outside_option(env.x_b() - d);
        if (!shifted.is_interior()) {
            out.push_back({0.0, true});
            continue;
        }
        out.push_back({expected_depth(shifted, table, env.m0(), method), false});
    }
    return out;
}

double sr_derivative_at_zero(const Environment& env, const PolicyTable& table, const DepthMethod& method) {
    require_interior(env, "sr_derivative_at_zero");
    const double s2 = env.sigma_eta2();
    if (std::holds_alternative<ClosedFormN2>(method)) {
        require_n2(env);
        const FirstStopReport rep = classify_first_stop(env, table);
        if (rep.regime == Regime::trust) return 0.0;
        // E[1{s1- < x1 < s1+} eta_1] with eta_1 ~ N(0, s2) integrates to sigma_eta (phi(lo) - phi(hi)).
        const double s = env.sigma_eta();
        const double centre = env.m0() + env.alpha(1);
        const double lo = (rep.s1_minus - centre) / s;
        const double hi = (rep.s1_plus - centre) / s;
        return s * (std_normal_pdf(lo) - std_normal_pdf(hi)) / s2;
    }
    const auto& mc = std::get<MonteCarlo>(method);
    double sum = 0.0;
    for (std::size_t k = 0; k < mc.n; ++k) {
        const SessionDraws d = draw_session(env, MuSpec{env.m0()}, mc.seed, k);
        const SessionPath p = run_session(env, table, d);
        double score = 0.0;
        for (int i = 1; i < p.depth; ++i) score += (p.depth - i) * d.eta[i - 1];
        sum += score;
    }
    return sum / (static_cast<double>(mc.n) * s2);
}

ABReport run_abtest(const Environment& env, const PolicyTable& table, std::span<const double> deltas,
                    const DepthMethod& method) {
    ABReport rep;
    rep.delta_grid.assign(deltas.begin(), deltas.end());
    rep.sr = sr_curve(env, table, deltas, method);
    for (const auto& p : lr_curve(env, table, deltas, method)) {
        rep.lr.push_back(p.depth);
        rep.lr_corner.push_back(p.corner);
    }
    rep.sr_prime_0 = sr_derivative_at_zero(env, table, method);
    rep.baseline = expected_depth(env, table, env.m0(), method);
    return rep;
}

}  // namespace standout
