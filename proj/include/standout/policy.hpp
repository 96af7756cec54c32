#pragma once

#include <string>
#include <vector>

#include "standout/belief.hpp"
#include "standout/environment.hpp"

namespace standout {

enum class PolicyKind { myopic, optimal };

/// Per-epoch thresholds. Entries are indexed by epoch t = 0..N-1.
struct PolicyTable {
    PolicyKind kind = PolicyKind::myopic;
    std::vector<double> kappa;
    std::vector<double> reservation;  // r_t = alpha_{t+1} + kappa_t
    double kappa_inf = 0.0;           // sigma_eta * g^{-1}(c / sigma_eta)

    int horizon() const { return static_cast<int>(kappa.size()); }
    /// r_t, or -inf once the list is exhausted.
    double reservation_at(int t) const;
};

/// sigma*_t g^{-1}(c / sigma*_t) for any t >= 0, including t >= N.
double myopic_kappa(const Environment& env, int t);
double kappa_limit(const Environment& env);

/// Throws NonInteriorError for corner environments.
PolicyTable myopic_table(const Environment& env);

struct SolverOptions {
    int grid_points = 4001;
    int quad_nodes = 64;           // per branch of the lead map
    double quad_half_width = 8.0;  // in units of sigma*_t
    double grid_margin = 10.0;     // in units of sigma*_t
};

/// Stop-continue gap of one epoch (continuation value minus stopping value) sampled on a
/// uniform lead grid ending at the epoch's reservation level, where the gap is zero.
struct GapGrid {
    double lo = 0.0;
    double h = 0.0;
    std::vector<double> values;

    double lead(std::size_t k) const { return lo + h * static_cast<double>(k); }
};

/// Backward-induction output; gap[t] belongs to epoch t.
struct OptimalSolution {
    PolicyTable table;
    std::vector<GapGrid> gap;
};

/// Throws NonInteriorError for corner environments, NumericalError when the gap fails to
/// change sign across the grid.
OptimalSolution solve_optimal(const Environment& env, const SolverOptions& opts = {});
PolicyTable optimal_table(const Environment& env, const SolverOptions& opts = {});

/// Stop iff L_t >= r_t; always true at the horizon.
bool should_stop(const BeliefState& state, const PolicyTable& table);

std::string to_string(PolicyKind kind);

}  // namespace standout
