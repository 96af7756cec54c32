#include "standout/firststop.hpp"

#include <cmath>
#include <limits>

#include "standout/belief.hpp"
#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"

namespace standout {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double stop_probability(const FirstStopReport& report, double mean, double sd) {
    if (report.regime == Regime::trust) return 1.0;
    return std_normal_cdf((report.s1_minus - mean) / sd) + std_normal_cdf((mean - report.s1_plus) / sd);
}

FirstStopReport classify_first_stop(const Environment& env, const PolicyTable& table,
                                    FirstStopMeasure measure) {
    require_interior(env, "classify_first_stop");
    FirstStopReport rep;
    double mean, sd;
    if (measure.mu) {
        mean = *measure.mu + env.alpha(1);
        sd = env.sigma_eta();
    } else {
        mean = env.m0() + env.alpha(1);
        sd = env.predictive_sd(0);
    }
    if (env.N() < 2) {
        rep.regime = Regime::trust;
        rep.s1_minus = -kInf;
        rep.s1_plus = kInf;
        rep.p_cut_losses = std_normal_cdf((env.x_b() - mean) / sd);
        rep.p_commit = std_normal_cdf((mean - env.x_b()) / sd);
        rep.p_tau1 = 1.0;
        return rep;
    }
    const double a1 = env.alpha(1), a2 = env.alpha(2), m0 = env.m0(), xb = env.x_b();
    const double w = bayes_weight(1, env);
    const double k1 = table.kappa.at(1);
    rep.omega1 = w;
    rep.kappa1 = k1;
    if (a1 - a2 >= k1 + (1.0 - w) * (m0 + a1 - xb)) {
        rep.regime = Regime::trust;
        rep.s1_minus = -kInf;
        rep.s1_plus = kInf;
        rep.p_cut_losses = std_normal_cdf((xb - mean) / sd);
        rep.p_commit = std_normal_cdf((mean - xb) / sd);
        rep.p_tau1 = 1.0;
        return rep;
    }
    rep.regime = Regime::explore;
    rep.s1_minus = m0 + a1 - (m0 + a2 + k1 - xb) / w;
    rep.s1_plus = w < 1.0 ? m0 + a1 + (k1 - (a1 - a2)) / (1.0 - w) : kInf;
    rep.p_cut_losses = std_normal_cdf((rep.s1_minus - mean) / sd);
    rep.p_commit = std_normal_cdf((mean - rep.s1_plus) / sd);
    rep.p_tau1 = rep.p_cut_losses + rep.p_commit;
    return rep;
}

double first_stop_margin(const Environment& env, const PolicyTable& table, double x1) {
    const BeliefState s = update(initial_state(env), x1, env);
    return s.L - table.reservation_at(1);
}

double diffuse_first_stop(const Environment& env, const PolicyTable& table, double mu) {
    if (env.N() < 2) throw DomainError("diffuse_first_stop: needs N >= 2");
    const double k1 = table.kappa.at(1);
    if (env.alpha(1) - env.alpha(2) >= k1) return 1.0;
    return std_normal_cdf((env.x_b() - mu - env.alpha(2) - k1) / env.sigma_eta());
}

CurseScan winners_curse_scan(const EnvironmentParams& base, std::span<const double> rho_grid,
                             PolicyKind kind, const SolverOptions& opts) {
    CurseScan scan;
    for (double rho : rho_grid) {
        if (!(rho > 0.0 && rho < 1.0)) throw DomainError("winners_curse_scan: rho must lie in (0, 1)");
        EnvironmentParams p = base;
        p.sigma_e2 = base.sigma_x2 * (1.0 - rho) / rho;
        const Environment env(p);
        CurseScanRow row;
        row.rho = rho;
        row.slack = env.interior_slack();
        row.interior = row.slack > 0.0;
        if (row.interior) {
            const PolicyTable table = kind == PolicyKind::optimal ? optimal_table(env, opts) : myopic_table(env);
            const FirstStopReport rep = classify_first_stop(env, table);
            row.trust = rep.regime == Regime::trust;
            row.p_tau1 = rep.p_tau1;
            row.kappa1 = rep.kappa1;
            if (row.trust && (!scan.smallest_trust_rho || rho < *scan.smallest_trust_rho))
                scan.smallest_trust_rho = rho;
        }
        scan.rows.push_back(row);
    }
    return scan;
}

std::string to_string(Regime regime) {
    return regime == Regime::trust ? "trust" : "explore";
}

}  // namespace standout
