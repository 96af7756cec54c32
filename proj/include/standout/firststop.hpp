#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "standout/environment.hpp"
#include "standout/policy.hpp"

namespace standout {

enum class Regime { trust, explore };

/// First-inspection analysis. In the trust regime the endpoints are infinite and the two
/// branch probabilities split the stop mass at x_1 = x_b.
struct FirstStopReport {
    Regime regime = Regime::trust;
    double s1_minus = 0.0;      // cut-losses endpoint, -inf under trust
    double s1_plus = 0.0;       // commit endpoint, +inf under trust
    double p_tau1 = 1.0;
    double p_cut_losses = 0.0;  // Pr(stop at 1, x_1 below the continuation interval)
    double p_commit = 0.0;      // Pr(stop at 1, x_1 above the continuation interval)
    double omega1 = 1.0;
    double kappa1 = 0.0;
};

/// Law of x_1 used for the probabilities: predictive N(m0 + alpha_1, v0 + sigma_eta^2) by
/// default, or N(mu + alpha_1, sigma_eta^2) conditional on a true page mean mu.
struct FirstStopMeasure {
    std::optional<double> mu;
};

FirstStopReport classify_first_stop(const Environment& env, const PolicyTable& table,
                                    FirstStopMeasure measure = {});

/// Pr(x_1 triggers a stop) given the endpoints and any Gaussian law for x_1.
double stop_probability(const FirstStopReport& report, double mean, double sd);

/// h(x_1) = L_1 - r_1; the session stops at rank 1 iff h >= 0.
double first_stop_margin(const Environment& env, const PolicyTable& table, double x1);

/// Large-prior-variance limit of Pr(tau = 1 | mu). Throws DomainError for N < 2.
double diffuse_first_stop(const Environment& env, const PolicyTable& table, double mu);

struct CurseScanRow {
    double rho = 0.0;
    bool interior = false;  // rows violating the interior condition are skipped
    double slack = 0.0;
    bool trust = false;
    double p_tau1 = 0.0;
    double kappa1 = 0.0;
};

struct CurseScan {
    std::vector<CurseScanRow> rows;
    std::optional<double> smallest_trust_rho;
};

/// Moves along sigma_e^2(rho) = sigma_x^2 (1 - rho) / rho, rebuilding the environment and
/// policy at every grid value.
CurseScan winners_curse_scan(const EnvironmentParams& base, std::span<const double> rho_grid,
                             PolicyKind kind = PolicyKind::optimal, const SolverOptions& opts = {});

std::string to_string(Regime regime);

}  // namespace standout
