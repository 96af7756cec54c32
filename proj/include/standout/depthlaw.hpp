#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "standout/environment.hpp"
#include "standout/policy.hpp"
#include "standout/rng.hpp"

namespace standout {

/// Lower end of the support of L_t given L_{t-1} = l_prev: (1 - omega_t) l_prev + omega_t alpha_t.
double lead_support_min(double l_prev, int t, const Environment& env);

/// Transition density of the lead chain from epoch t-1 to t (t >= 1).
double lead_kernel_density(double l_prev, double y, int t, const Environment& env);

/// Transition CDF Pr(L_t <= y | L_{t-1} = l_prev).
double lead_kernel_cdf(double l_prev, double y, int t, const Environment& env);

/// Law of L_t on the event that the session continues past epoch t, as point masses at the
/// centres of uniform cells on [lo, lo + h * mass.size()].
struct SurvivalMeasure {
    int t = 0;
    double lo = 0.0;
    double h = 0.0;
    std::vector<double> mass;

    double centre(std::size_t j) const { return lo + h * (static_cast<double>(j) + 0.5); }
    double total() const;
};

struct DepthDistribution {
    std::vector<double> pmf;                // Pr(tau = t), t = 0..N
    std::vector<SurvivalMeasure> survival;  // epochs 0..N-1 with surviving mass
    std::optional<double> mu;               // set for the conditional-on-mu law

    double mean() const;
};

struct DepthGridOptions {
    int cells = 4001;
    double leakage_tol = 1e-6;
};

/// Exact depth law under the predictive measure via the lead-chain recursion.
/// Throws NonInteriorError for corner environments and NumericalError on mass leakage.
DepthDistribution depth_distribution(const Environment& env, const PolicyTable& table,
                                     const DepthGridOptions& opts = {});

/// Depth law conditional on a true page mean. Closed form, N = 2 only (DomainError otherwise).
DepthDistribution depth_distribution_conditional(const Environment& env, const PolicyTable& table, double mu);

/// Pr(tau >= i) for i = 1..N.
std::vector<double> position_propensity(const DepthDistribution& dist);

struct SessionPath {
    double mu = 0.0;
    std::vector<double> x;  // inspected relevances, ranks 1..depth
    int depth = 0;
    int J = 0;              // 0 = outside option
    double payoff = 0.0;    // M_tau - c tau
};

/// Page-mean source: draw from the prior N(m0, v0), or hold fixed.
struct MuSpec {
    std::optional<double> fixed;
};

/// Latent draws of one session: mu and all N residuals, whatever the stopping rule does.
struct SessionDraws {
    double mu = 0.0;
    std::vector<double> eta;
};

/// Session `index` under `seed`. The stream is keyed by (seed, index) only.
SessionDraws draw_session(const Environment& env, const MuSpec& mu, std::uint64_t seed, std::uint64_t index);

/// Walks ranks in order from given draws and applies the stopping rule.
SessionPath run_session(const Environment& env, const PolicyTable& table, const SessionDraws& draws);

/// Sessions index_begin .. index_begin + n - 1. Throws NonInteriorError for corner environments.
std::vector<SessionPath> simulate_sessions(const Environment& env, const PolicyTable& table, const MuSpec& mu,
                                           std::size_t n, std::uint64_t seed, std::uint64_t index_begin = 0);

/// Empirical depth pmf over 0..N.
std::vector<double> empirical_pmf(const std::vector<SessionPath>& paths, int N);

}  // namespace standout
