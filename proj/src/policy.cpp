#include "standout/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"

namespace standout {

double PolicyTable::reservation_at(int t) const {
    if (t >= horizon()) return -std::numeric_limits<double>::infinity();
    return reservation[static_cast<std::size_t>(t)];
}

double myopic_kappa(const Environment& env, int t) {
    const double s = env.predictive_sd(t);
    return s * g_inverse(env.c() / s);
}

double kappa_limit(const Environment& env) {
    return env.sigma_eta() * g_inverse(env.c() / env.sigma_eta());
}

PolicyTable myopic_table(const Environment& env) {
    require_interior(env, "myopic_table");
    PolicyTable table;
    table.kind = PolicyKind::myopic;
    table.kappa_inf = kappa_limit(env);
    for (int t = 0; t < env.N(); ++t) {
        table.kappa.push_back(myopic_kappa(env, t));
        table.reservation.push_back(env.alpha(t + 1) + table.kappa.back());
    }
    return table;
}

namespace {

// Option value W(y) = Vbar(y) - y of the next epoch. Zero from the reservation level up;
// below the grid the gap is extended linearly, since it has slope -1 far from the kink.
class NextValue {
public:
    NextValue(const GapGrid* grid, double root) : grid_(grid), root_(root) {}

    double operator()(double y) const {
        if (grid_ == nullptr || y >= root_) return 0.0;
        const auto& d = grid_->values;
        const double u = (y - grid_->lo) / grid_->h;
        if (u < 0.0) return std::max(0.0, d[0] + u * (d[1] - d[0]));
        auto k = static_cast<std::size_t>(u);
        if (k > d.size() - 2) k = d.size() - 2;
        const double f = u - static_cast<double>(k);
        return std::max(0.0, d[k] + f * (d[k + 1] - d[k]));
    }

private:
    const GapGrid* grid_;
    double root_;
};

struct EpochGap {
    double c, a, sigma, omega, half_width;
    NextValue next;
    const GaussLegendre* rule;
    double next_root;

    double integrate(double from, double to, double l, bool discovery) const {
        if (!(to > from)) return 0.0;
        const double mid = 0.5 * (from + to);
        const double half = 0.5 * (to - from);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            const double xi = mid + half * rule->nodes[i];
            const double psi = discovery ? a + (1.0 - omega) * xi : l - omega * xi;
            sum += rule->weights[i] * next(psi) * std_normal_pdf(xi / sigma);
        }
        return sum * half / sigma;
    }

    double operator()(double l) const {
        // E[max(l, a + xi)] - l in closed form; the option value of continuing further is
        // integrated over the next epoch's continuation interval, split at the kink xi = l - a.
        double value = -c + sigma * g((l - a) / sigma);
        if (!std::isfinite(next_root)) return value;
        const double kink = l - a;
        const double lim = half_width * sigma;
        const double d_lo = std::max((l - next_root) / omega, -lim);
        const double d_hi = std::min(kink, lim);
        const double u_lo = std::max(kink, -lim);
        const double u_hi = std::min((next_root - a) / (1.0 - omega), lim);
        return value + integrate(d_lo, d_hi, l, false) + integrate(u_lo, u_hi, l, true);
    }
};

}  // namespace

OptimalSolution solve_optimal(const Environment& env, const SolverOptions& opts) {
    require_interior(env, "optimal_table");
    if (opts.grid_points < 3) throw DomainError("optimal_table: grid needs at least 3 points");
    const int N = env.N();
    const double s0 = env.predictive_sd(0);
    double amax = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < N; ++t) amax = std::max(amax, env.alpha(t + 1) + myopic_kappa(env, t));
    const double bracket_lo = env.alpha(N) - opts.grid_margin * s0;
    const double bracket_hi = amax + opts.grid_margin * s0;

    OptimalSolution sol;
    sol.gap.resize(N);
    PolicyTable& table = sol.table;
    table.kind = PolicyKind::optimal;
    table.kappa.assign(N, 0.0);
    table.reservation.assign(N, 0.0);
    table.kappa_inf = kappa_limit(env);

    const GaussLegendre& rule = gauss_legendre(opts.quad_nodes);
    const int K = opts.grid_points;
    double next_root = std::numeric_limits<double>::infinity();
    for (int t = N - 1; t >= 0; --t) {
        const double v = env.posterior_variance(t);
        const double sigma = env.predictive_sd(t);
        const EpochGap gap{env.c(), env.alpha(t + 1), sigma, v / (v + env.sigma_eta2()),
                           opts.quad_half_width,
                           NextValue(t + 1 < N ? &sol.gap[t + 1] : nullptr, next_root), &rule, next_root};

        double a = bracket_lo, b = bracket_hi;
        const double fa = gap(a), fb = gap(b);
        if (!(fa > 0.0 && fb < 0.0)) {
            std::ostringstream msg;
            msg << "optimal_table: gap does not change sign on [" << a << ", " << b << "] at t=" << t
                << " (gap(lo)=" << fa << ", gap(hi)=" << fb << ")";
            throw NumericalError(msg.str());
        }
        // Bisect to full precision; the gap is strictly decreasing in the lead.
        for (int it = 0; it < 4096; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            (gap(mid) >= 0.0 ? a : b) = mid;
        }
        const double root = 0.5 * (a + b);
        table.reservation[t] = root;
        table.kappa[t] = root - env.alpha(t + 1);

        GapGrid& grid = sol.gap[t];
        grid.lo = std::min(env.alpha(t + 1), root) - opts.grid_margin * sigma;
        grid.h = (root - grid.lo) / (K - 1);
        grid.values.resize(K);
        for (int k = 0; k < K; ++k) grid.values[k] = gap(grid.lead(k));
        next_root = root;
    }
    return sol;
}

PolicyTable optimal_table(const Environment& env, const SolverOptions& opts) {
    return solve_optimal(env, opts).table;
}

bool should_stop(const BeliefState& state, const PolicyTable& table) {
    if (state.t >= table.horizon()) return true;
    return state.L >= table.reservation[static_cast<std::size_t>(state.t)];
}

std::string to_string(PolicyKind kind) {
    return kind == PolicyKind::myopic ? "myopic" : "optimal";
}

}  // namespace standout
