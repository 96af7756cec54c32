#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "standout/belief.hpp"
#include "standout/environment.hpp"
#include "standout/policy.hpp"

namespace standout {

/// Which candidate generated a row: the outside option (rank 0) or inspected rank j.
struct RowTag {
    int epoch = 0;
    int rank = 0;
};

/// coeffs . x < rhs over (x_1..x_{t-1}).
struct LinearInequality {
    std::vector<double> coeffs;
    double rhs = 0.0;
    RowTag tag;

    bool holds(std::span<const double> x) const;
};

struct SurvivalRegion {
    int t = 0;
    std::vector<LinearInequality> inequalities;
    std::vector<LinearInequality> extra;  // conversion restriction, empty for the plain region
    int conversion = -1;                  // j of the restriction, -1 when absent

    std::size_t dimension() const { return t > 1 ? static_cast<std::size_t>(t - 1) : 0; }
};

/// Survival polyhedron {tau >= t}: t(t+1)/2 - 1 rows, empty for t < 2.
SurvivalRegion build_survival_region(int t, const Environment& env, const PolicyTable& table);

/// Adds the rows forcing x_j to be the running maximum (j >= 1) or every x_r below x_b (j = 0).
/// Only j in 0..t-1 restricts the history.
SurvivalRegion restrict_to_conversion(SurvivalRegion region, int j, const Environment& env);

/// True iff every row holds strictly. Throws DomainError on a length mismatch.
bool membership(const SurvivalRegion& region, std::span<const double> x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class StopKind { two_tails, all_reals };

/// Rank-t realizations that end the session, optionally cut to a conversion index.
struct StoppingSet {
    StopKind kind = StopKind::all_reals;
    double lower = 0.0;  // stop for x_t <= lower (two_tails)
    double upper = 0.0;  // stop for x_t >= upper (two_tails)
    std::vector<Interval> pieces;  // disjoint, ascending; the set after any conversion cut

    bool contains(double x) const;
    /// Pr(X in set) for X ~ N(mean, sd^2).
    double gaussian_mass(double mean, double sd) const;
    /// d/d mean of gaussian_mass.
    double gaussian_mass_dmean(double mean, double sd) const;
    /// Same set with pieces cut to the interval.
    StoppingSet intersected(Interval cut) const;
};

/// Stopping set at rank state.t + 1 from the beliefs after a surviving history.
StoppingSet stopping_set_at(const BeliefState& state, const Environment& env, const PolicyTable& table);

/// Stopping set at rank t = history.size() + 1. Throws ContractError if the history does not
/// survive to t, HorizonError if t > N.
StoppingSet stopping_set(std::span<const double> history, const Environment& env, const PolicyTable& table);

/// Stopping set intersected with the event J = j. Throws ContractError if the history violates
/// the conversion restriction, DomainError if j is out of 0..t.
StoppingSet conversion_set(std::span<const double> history, int j, const Environment& env,
                           const PolicyTable& table);

/// Vertices of a bounded two-dimensional region (t = 3), counter-clockwise. Empty if the
/// region is empty or unbounded.
std::vector<std::array<double, 2>> polygon_vertices(const SurvivalRegion& region);

}  // namespace standout
