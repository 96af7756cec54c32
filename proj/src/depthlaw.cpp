#include "standout/depthlaw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "standout/belief.hpp"
#include "standout/errors.hpp"
#include "standout/firststop.hpp"
#include "standout/gaussmath.hpp"

namespace standout {

namespace {

struct Kernel {
    double omega, alpha, up_scale, down_scale;

    Kernel(int t, const Environment& env) {
        omega = bayes_weight(t, env);
        alpha = env.alpha(t);
        const double s = env.predictive_sd(t - 1);
        up_scale = (1.0 - omega) * s;
        down_scale = omega * s;
    }

    double support_min(double l) const { return (1.0 - omega) * l + omega * alpha; }

    double cdf(double l, double y) const {
        if (y <= support_min(l)) return 0.0;
        return std_normal_cdf((y - alpha) / up_scale) - std_normal_cdf((l - y) / down_scale);
    }

    double density(double l, double y) const {
        if (y < support_min(l)) return 0.0;
        return std_normal_pdf((y - alpha) / up_scale) / up_scale +
               std_normal_pdf((l - y) / down_scale) / down_scale;
    }
};

}  // namespace

double lead_support_min(double l_prev, int t, const Environment& env) {
    if (t < 1 || t > env.N()) throw DomainError("lead kernel: epoch must lie in 1..N");
    return Kernel(t, env).support_min(l_prev);
}

double lead_kernel_density(double l_prev, double y, int t, const Environment& env) {
    if (t < 1 || t > env.N()) throw DomainError("lead kernel: epoch must lie in 1..N");
    return Kernel(t, env).density(l_prev, y);
}

double lead_kernel_cdf(double l_prev, double y, int t, const Environment& env) {
    if (t < 1 || t > env.N()) throw DomainError("lead kernel: epoch must lie in 1..N");
    return Kernel(t, env).cdf(l_prev, y);
}

double SurvivalMeasure::total() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double DepthDistribution::mean() const {
    double m = 0.0;
    for (std::size_t t = 0; t < pmf.size(); ++t) m += static_cast<double>(t) * pmf[t];
    return m;
}

DepthDistribution depth_distribution(const Environment& env, const PolicyTable& table,
                                     const DepthGridOptions& opts) {
    require_interior(env, "depth_distribution");
    if (opts.cells < 1) throw DomainError("depth_distribution: need at least one cell");
    const int N = env.N();
    DepthDistribution dist;
    dist.pmf.assign(N + 1, 0.0);

    // Surviving mass as point masses; epoch 0 is a single atom at the initial lead.
    std::vector<double> pos{env.x_b() - env.m0()};
    std::vector<double> mass{1.0};
    double support_lo = pos[0];
    if (pos[0] >= table.reservation_at(0)) {
        dist.pmf[0] = 1.0;
        return dist;
    }
    dist.survival.push_back({0, pos[0], 0.0, {1.0}});

    for (int t = 1; t <= N; ++t) {
        const double incoming = std::accumulate(mass.begin(), mass.end(), 0.0);
        if (t == N) {
            dist.pmf[N] = incoming;
            break;
        }
        const Kernel k(t, env);
        const double r = table.reservation_at(t);
        const double lo = k.support_min(support_lo);
        if (r <= lo) {
            dist.pmf[t] = incoming;
            break;
        }
        double stopped = 0.0;
        for (std::size_t i = 0; i < pos.size(); ++i) stopped += mass[i] * (1.0 - k.cdf(pos[i], r));

        const int J = opts.cells;
        const double h = (r - lo) / J;
        std::vector<double> edge_up(J + 1);
        for (int j = 0; j <= J; ++j) edge_up[j] = std_normal_cdf((lo + h * j - k.alpha) / k.up_scale);
        std::vector<double> next(J, 0.0);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            if (mass[i] == 0.0) continue;
            const double l = pos[i];
            const double lmin = k.support_min(l);
            double prev = 0.0;
            for (int j = 1; j <= J; ++j) {
                const double e = lo + h * j;
                const double F = e <= lmin ? 0.0 : edge_up[j] - std_normal_cdf((l - e) / k.down_scale);
                next[j - 1] += mass[i] * (F - prev);
                prev = F;
            }
        }
        const double kept = std::accumulate(next.begin(), next.end(), 0.0);
        if (std::abs(incoming - stopped - kept) > opts.leakage_tol) {
            std::ostringstream msg;
            msg << "depth_distribution: mass leakage " << incoming - stopped - kept << " at epoch " << t
                << " (cells=" << J << ", lo=" << lo << ", r=" << r << ")";
            throw NumericalError(msg.str());
        }
        dist.pmf[t] = stopped;
        SurvivalMeasure sm{t, lo, h, next};
        pos.resize(J);
        for (int j = 0; j < J; ++j) pos[j] = sm.centre(j);
        mass = std::move(next);
        support_lo = lo;
        dist.survival.push_back(std::move(sm));
    }
    return dist;
}

DepthDistribution depth_distribution_conditional(const Environment& env, const PolicyTable& table, double mu) {
    if (env.N() != 2) throw DomainError("depth_distribution_conditional: closed form needs N = 2");
    const FirstStopReport rep = classify_first_stop(env, table);
    DepthDistribution dist;
    dist.mu = mu;
    const double p1 = stop_probability(rep, mu + env.alpha(1), env.sigma_eta());
    dist.pmf = {0.0, p1, 1.0 - p1};
    return dist;
}

std::vector<double> position_propensity(const DepthDistribution& dist) {
    const int N = static_cast<int>(dist.pmf.size()) - 1;
    std::vector<double> p(N, 0.0);
    double tail = 0.0;
    for (int i = N; i >= 1; --i) {
        tail += dist.pmf[i];
        p[i - 1] = tail;
    }
    return p;
}

SessionDraws draw_session(const Environment& env, const MuSpec& mu, std::uint64_t seed, std::uint64_t index) {
    RandomStream rng(seed, index);
    SessionDraws d;
    const double z0 = rng.normal();
    d.mu = mu.fixed ? *mu.fixed : env.m0() + std::sqrt(env.v0()) * z0;
    d.eta.resize(env.N());
    for (auto& e : d.eta) e = env.sigma_eta() * rng.normal();
    return d;
}

SessionPath run_session(const Environment& env, const PolicyTable& table, const SessionDraws& draws) {
    SessionPath path;
    path.mu = draws.mu;
    BeliefState s = initial_state(env);
    double best = env.x_b();
    while (!should_stop(s, table)) {
        const int i = s.t + 1;
        const double x = draws.mu + env.alpha(i) + draws.eta[i - 1];
        path.x.push_back(x);
        if (x > best) {
            best = x;
            path.J = i;
        }
        s = update(s, x, env);
    }
    path.depth = s.t;
    path.payoff = s.M - env.c() * s.t;
    return path;
}

std::vector<SessionPath> simulate_sessions(const Environment& env, const PolicyTable& table, const MuSpec& mu,
                                           std::size_t n, std::uint64_t seed, std::uint64_t index_begin) {
    require_interior(env, "simulate_sessions");
    std::vector<SessionPath> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(run_session(env, table, draw_session(env, mu, seed, index_begin + k)));
    return out;
}

std::vector<double> empirical_pmf(const std::vector<SessionPath>& paths, int N) {
    std::vector<double> pmf(N + 1, 0.0);
    for (const auto& p : paths) pmf[p.depth] += 1.0;
    for (auto& v : pmf) v /= static_cast<double>(paths.size());
    return pmf;
}

}  // namespace standout
