#include "standout/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "standout/belief.hpp"
#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"

namespace standout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beliefs after the history, checking that every epoch before rank t continued.
BeliefState walk_surviving(std::span<const double> history, const Environment& env, const PolicyTable& table) {
    const int t = static_cast<int>(history.size()) + 1;
    if (t > env.N()) throw HorizonError("stopping_set: history longer than N - 1");
    BeliefState s = initial_state(env);
    for (double x : history) {
        if (should_stop(s, table)) throw ContractError("history does not survive to the requested rank");
        s = update(s, x, env);
    }
    if (should_stop(s, table)) throw ContractError("history does not survive to the requested rank");
    return s;
}

std::vector<Interval> intersect(const std::vector<Interval>& pieces, Interval cut) {
    std::vector<Interval> out;
    for (const auto& p : pieces) {
        const Interval q{std::max(p.lo, cut.lo), std::min(p.hi, cut.hi)};
        if (q.lo < q.hi) out.push_back(q);
    }
    return out;
}

}  // namespace

bool LinearInequality::holds(std::span<const double> x) const {
    double lhs = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) lhs += coeffs[i] * x[i];
    return lhs < rhs;
}

SurvivalRegion build_survival_region(int t, const Environment& env, const PolicyTable& table) {
    SurvivalRegion region;
    region.t = t;
    if (t < 2) return region;
    if (t > env.N()) throw HorizonError("build_survival_region: t exceeds N");
    require_interior(env, "build_survival_region");
    const std::size_t dim = static_cast<std::size_t>(t - 1);
    double alpha_sum = 0.0;
    for (int s = 1; s <= t - 1; ++s) {
        alpha_sum += env.alpha(s);
        const double v = env.posterior_variance(s);
        const double gamma = v / env.sigma_eta2();
        const double a = (v / env.v0()) * env.m0() - gamma * alpha_sum;
        const double r = table.reservation_at(s);
        std::vector<double> base(dim, 0.0);
        for (int q = 0; q < s; ++q) base[q] = -gamma;
        region.inequalities.push_back({base, a + r - env.x_b(), {s, 0}});
        for (int j = 1; j <= s; ++j) {
            std::vector<double> row = base;
            row[j - 1] += 1.0;
            region.inequalities.push_back({std::move(row), a + r, {s, j}});
        }
    }
    return region;
}

SurvivalRegion restrict_to_conversion(SurvivalRegion region, int j, const Environment& env) {
    const int t = region.t;
    if (j < 0 || j > t) throw DomainError("restrict_to_conversion: j must lie in 0..t");
    region.conversion = j;
    region.extra.clear();
    const std::size_t dim = region.dimension();
    if (j == t) return region;
    if (j == 0) {
        for (std::size_t q = 0; q < dim; ++q) {
            std::vector<double> row(dim, 0.0);
            row[q] = 1.0;
            region.extra.push_back({std::move(row), env.x_b(), {t, 0}});
        }
        return region;
    }
    std::vector<double> above_outside(dim, 0.0);
    above_outside[j - 1] = -1.0;
    region.extra.push_back({std::move(above_outside), -env.x_b(), {t, j}});
    for (std::size_t q = 0; q < dim; ++q) {
        if (q == static_cast<std::size_t>(j - 1)) continue;
        std::vector<double> row(dim, 0.0);
        row[q] = 1.0;
        row[j - 1] = -1.0;
        region.extra.push_back({std::move(row), 0.0, {t, j}});
    }
    return region;
}

bool membership(const SurvivalRegion& region, std::span<const double> x) {
    if (x.size() != region.dimension()) throw DomainError("membership: length mismatch");
    for (const auto& row : region.inequalities)
        if (!row.holds(x)) return false;
    for (const auto& row : region.extra)
        if (!row.holds(x)) return false;
    return true;
}

bool StoppingSet::contains(double x) const {
    for (const auto& p : pieces)
        if (x >= p.lo && x <= p.hi) return true;
    return false;
}

double StoppingSet::gaussian_mass(double mean, double sd) const {
    double total = 0.0;
    for (const auto& p : pieces) {
        if (p.lo == -kInf && p.hi == kInf) total += 1.0;
        else if (p.lo == -kInf) total += std_normal_cdf((p.hi - mean) / sd);
        else if (p.hi == kInf) total += std_normal_cdf((mean - p.lo) / sd);
        else total += std_normal_cdf((p.hi - mean) / sd) - std_normal_cdf((p.lo - mean) / sd);
    }
    return total;
}

double StoppingSet::gaussian_mass_dmean(double mean, double sd) const {
    double total = 0.0;
    for (const auto& p : pieces) {
        const double at_lo = p.lo == -kInf ? 0.0 : std_normal_pdf((p.lo - mean) / sd);
        const double at_hi = p.hi == kInf ? 0.0 : std_normal_pdf((p.hi - mean) / sd);
        total += (at_lo - at_hi) / sd;
    }
    return total;
}

StoppingSet StoppingSet::intersected(Interval cut) const {
    StoppingSet out = *this;
    out.pieces = intersect(pieces, cut);
    return out;
}

StoppingSet stopping_set(std::span<const double> history, const Environment& env, const PolicyTable& table) {
    return stopping_set_at(walk_surviving(history, env, table), env, table);
}

StoppingSet stopping_set_at(const BeliefState& s, const Environment& env, const PolicyTable& table) {
    const int t = s.t + 1;
    StoppingSet set;
    if (t < env.N()) {
        const double w = bayes_weight(t, env);
        const double a = env.alpha(t);
        const double r = table.reservation_at(t);
        if (r > (1.0 - w) * s.L + w * a) {
            set.kind = StopKind::two_tails;
            set.lower = s.m + a + (s.L - r) / w;
            set.upper = s.m + a + (r - a) / (1.0 - w);
            set.pieces = {{-kInf, set.lower}, {set.upper, kInf}};
            return set;
        }
    }
    set.kind = StopKind::all_reals;
    set.pieces = {{-kInf, kInf}};
    return set;
}

StoppingSet conversion_set(std::span<const double> history, int j, const Environment& env,
                           const PolicyTable& table) {
    const int t = static_cast<int>(history.size()) + 1;
    if (j < 0 || j > t) throw DomainError("conversion_set: j must lie in 0..t");
    StoppingSet set = stopping_set(history, env, table);
    const double xb = env.x_b();
    if (j == t) {
        double best = xb;
        for (double x : history) best = std::max(best, x);
        set = set.intersected({best, kInf});
    } else if (j == 0) {
        for (double x : history)
            if (!(x < xb)) throw ContractError("conversion_set: history exceeds the outside option");
        set = set.intersected({-kInf, xb});
    } else {
        const double xj = history[j - 1];
        if (!(xj > xb)) throw ContractError("conversion_set: x_j does not beat the outside option");
        for (int q = 1; q < t; ++q)
            if (q != j && !(history[q - 1] < xj)) throw ContractError("conversion_set: x_j is not the running maximum");
        set = set.intersected({-kInf, xj});
    }
    return set;
}

std::vector<std::array<double, 2>> polygon_vertices(const SurvivalRegion& region) {
    if (region.dimension() != 2) throw DomainError("polygon_vertices: region must be two-dimensional");
    std::vector<LinearInequality> rows = region.inequalities;
    rows.insert(rows.end(), region.extra.begin(), region.extra.end());

    // Bounded iff the outward normals leave no angular gap of pi or more.
    std::vector<double> angles;
    for (const auto& r : rows) angles.push_back(std::atan2(r.coeffs[1], r.coeffs[0]));
    std::sort(angles.begin(), angles.end());
    if (angles.empty()) return {};
    double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    if (gap >= std::numbers::pi) return {};

    std::vector<std::array<double, 2>> verts;
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const auto& p = rows[a];
            const auto& q = rows[b];
            const double det = p.coeffs[0] * q.coeffs[1] - p.coeffs[1] * q.coeffs[0];
            if (std::abs(det) < 1e-14) continue;
            const double x = (p.rhs * q.coeffs[1] - p.coeffs[1] * q.rhs) / det;
            const double y = (p.coeffs[0] * q.rhs - p.rhs * q.coeffs[0]) / det;
            bool feasible = true;
            for (const auto& r : rows)
                if (r.coeffs[0] * x + r.coeffs[1] * y > r.rhs + 1e-9 * (1.0 + std::abs(r.rhs))) feasible = false;
            if (!feasible) continue;
            bool dup = false;
            for (const auto& v : verts)
                if (std::abs(v[0] - x) < 1e-9 && std::abs(v[1] - y) < 1e-9) dup = true;
            if (!dup) verts.push_back({x, y});
        }
    }
    if (verts.size() < 3) return {};
    double cx = 0.0, cy = 0.0;
    for (const auto& v : verts) cx += v[0], cy += v[1];
    cx /= static_cast<double>(verts.size());
    cy /= static_cast<double>(verts.size());
    std::sort(verts.begin(), verts.end(), [&](const auto& u, const auto& v) {
        return std::atan2(u[1] - cy, u[0] - cx) < std::atan2(v[1] - cy, v[0] - cx);
    });
    return verts;
}

}  // namespace standout
