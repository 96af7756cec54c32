#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "standout/environment.hpp"
#include "standout/policy.hpp"

namespace standout {

struct ClosedFormN2 {};
struct MonteCarlo {
    std::size_t n = 100000;
    std::uint64_t seed = 0;
};
using DepthMethod = std::variant<ClosedFormN2, MonteCarlo>;

/// Expected depth conditional on the true page mean mu, for a policy built at the prior
/// carried by env. Closed form requires N = 2 (DomainError otherwise).
double expected_depth(const Environment& env, const PolicyTable& table, double mu, const DepthMethod& method);

/// SR(delta) = T(m0 + delta, m0, x_b): the page improves, beliefs do not.
std::vector<double> sr_curve(const Environment& env, const PolicyTable& table, std::span<const double> deltas,
                             const DepthMethod& method);

struct LongRunPoint {
    double depth = 0.0;
    bool corner = false;  // shifted outside option violates the interior condition; depth reported as 0
};

/// LR(delta) = T(m0, m0, x_b - delta). The thresholds do not depend on x_b, so `table` is reused.
std::vector<LongRunPoint> lr_curve(const Environment& env, const PolicyTable& table,
                                   std::span<const double> deltas, const DepthMethod& method);

/// SR'(0): closed form for N = 2, score-function average (1/sigma_eta^2) sum_{i<tau} (tau - i) eta_i otherwise.
double sr_derivative_at_zero(const Environment& env, const PolicyTable& table, const DepthMethod& method);

struct ABReport {
    std::vector<double> delta_grid;
    std::vector<double> sr;
    std::vector<double> lr;
    std::vector<bool> lr_corner;
    double sr_prime_0 = 0.0;
    double baseline = 0.0;
};

ABReport run_abtest(const Environment& env, const PolicyTable& table, std::span<const double> deltas,
                    const DepthMethod& method);

}  // namespace standout
