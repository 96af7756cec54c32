#pragma once

#include <string>
#include <vector>

namespace standout {

enum class QuantileRule { midpoint, blom };

/// Model primitives as a user configures them.
struct EnvironmentParams {
    int N = 2;              // list length
    double sigma_x2 = 1.0;  // relevance variance
    double sigma_e2 = 1.0;  // ranker noise variance
    double v0 = 1.0;        // prior variance of the page mean
    double m0 = 0.0;        // prior mean of the page mean
    double x_b = 0.0;       // outside-option relevance
    double c = 0.1;         // per-inspection cost
    QuantileRule quantile_rule = QuantileRule::midpoint;

    /// Throws DomainError if a primitive is out of range.
    void validate() const;
};

struct DerivedConstants {
    double rho = 0.0;
    double sigma_z = 0.0;
    double sigma_eta2 = 0.0;
    std::vector<double> q;      // q_1..q_N
    std::vector<double> alpha;  // alpha_1..alpha_N
};

/// Rank quantiles and shifts implied by the primitives.
DerivedConstants derive(const EnvironmentParams& params);

/// Everything downstream modules need, stated directly. alpha is indexed by rank - 1.
struct Primitives {
    std::vector<double> alpha;
    double sigma_eta2 = 1.0;
    double v0 = 1.0;
    double m0 = 0.0;
    double x_b = 0.0;
    double c = 0.1;
};

/// Immutable environment. Built either from EnvironmentParams or from raw primitives
/// (fixed rank shifts and residual variance, as in calibrated or illustrative settings).
class Environment {
public:
    explicit Environment(const EnvironmentParams& params);
    explicit Environment(Primitives prims);

    int N() const { return static_cast<int>(prims_.alpha.size()); }
    /// Rank shift for rank i in 1..N.
    double alpha(int i) const { return prims_.alpha[static_cast<std::size_t>(i - 1)]; }
    const std::vector<double>& alphas() const { return prims_.alpha; }
    double sigma_eta2() const { return prims_.sigma_eta2; }
    double sigma_eta() const { return sigma_eta_; }
    double v0() const { return prims_.v0; }
    double m0() const { return prims_.m0; }
    double x_b() const { return prims_.x_b; }
    double c() const { return prims_.c; }
    const Primitives& primitives() const { return prims_; }

    /// Posterior variance after t inspections.
    double posterior_variance(int t) const;
    /// Predictive SD sigma*_t = sqrt(v_t + sigma_eta^2) for the next rank after t inspections.
    double predictive_sd(int t) const;

    /// Expected gain from inspecting rank 1 minus c.
    double interior_slack() const;
    bool is_interior() const { return interior_slack() > 0.0; }

    Environment with_outside_option(double x_b) const;
    Environment with_prior_mean(double m0) const;
    Environment with_cost(double c) const;

private:
    Primitives prims_;
    double sigma_eta_ = 1.0;
};

/// Interior-solution slack of the configured primitives.
double interior_condition_slack(const EnvironmentParams& params);

/// Throws NonInteriorError unless env.is_interior().
void require_interior(const Environment& env, const char* who);

std::string to_string(QuantileRule rule);
QuantileRule quantile_rule_from_string(const std::string& s);

}  // namespace standout
