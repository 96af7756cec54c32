#include "standout/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "standout/belief.hpp"
#include "standout/errors.hpp"
#include "standout/rng.hpp"
#include "standout/survival.hpp"

namespace standout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void run(const Executor& exec, std::size_t count, const std::function<void(std::size_t)>& body) {
    if (exec) {
        exec(count, body);
        return;
    }
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace

double AffineFeatureModel::predict(std::span<const double> beta, std::span<const double> w) const {
    if (w.size() != features_ || beta.size() != num_params()) throw DomainError("AffineFeatureModel: size mismatch");
    double f = intercept_ ? beta[features_] : 0.0;
    for (std::size_t k = 0; k < features_; ++k) f += beta[k] * w[k];
    return f;
}

void AffineFeatureModel::jacobian(std::span<const double> beta, std::span<const double> w,
                                  std::span<double> out) const {
    if (w.size() != features_ || beta.size() != num_params() || out.size() != num_params())
        throw DomainError("AffineFeatureModel: size mismatch");
    for (std::size_t k = 0; k < features_; ++k) out[k] = w[k];
    if (intercept_) out[features_] = 1.0;
}

Calibration calibrate(std::span<const SessionRecord> records, const FeatureModel& model,
                      std::span<const double> beta, std::span<const double> alpha) {
    if (records.size() < 2) throw DomainError("calibrate: need at least two sessions");
    const std::size_t N = alpha.size();
    std::vector<double> session_mean(records.size());
    double within = 0.0;
    std::vector<double> d(N);
    for (std::size_t n = 0; n < records.size(); ++n) {
        if (records[n].features.size() != N) throw DomainError("calibrate: every session needs N ranked feature vectors");
        double mean = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            d[i] = model.predict(beta, records[n].features[i]) - alpha[i];
            mean += d[i];
        }
        mean /= static_cast<double>(N);
        double var = 0.0;
        for (std::size_t i = 0; i < N; ++i) var += (d[i] - mean) * (d[i] - mean);
        within += var / static_cast<double>(N);
        session_mean[n] = mean;
    }
    const double S = static_cast<double>(records.size());
    double grand = 0.0, sq = 0.0;
    for (double m : session_mean) grand += m;
    grand /= S;
    for (double m : session_mean) sq += (m - grand) * (m - grand);
    Calibration cal;
    cal.v0 = sq / S;
    cal.sigma_eta2 = within / S + 1.0;
    if (!(cal.v0 > 1e-12 * (1.0 + grand * grand)))
        throw CalibrationError("calibrate: across-session variance of the page mean is degenerate");
    return cal;
}

Environment user_environment(const UserPrimitives& prims, const Calibration& cal, std::span<const double> alpha) {
    Primitives p;
    p.alpha.assign(alpha.begin(), alpha.end());
    p.sigma_eta2 = cal.sigma_eta2;
    p.v0 = cal.v0;
    p.m0 = 0.0;
    p.x_b = prims.x_b;
    p.c = prims.c;
    return Environment(std::move(p));
}

SessionLikelihood session_likelihood(std::span<const double> means, int depth, std::optional<int> J,
                                     const Environment& env, const PolicyTable& table,
                                     const EstimatorOptions& opts, std::uint64_t session) {
    const int t = depth;
    if (t < 1 || t > env.N()) throw DomainError("session_likelihood: depth must lie in 1..N");
    if (means.size() < static_cast<std::size_t>(t)) throw DomainError("session_likelihood: need a mean for every inspected rank");
    if (J && (*J < 0 || *J > t)) throw DomainError("session_likelihood: conversion index exceeds depth");
    if (opts.n < 1) throw DomainError("session_likelihood: need at least one sample");
    if (opts.anchor && opts.anchor->size() < static_cast<std::size_t>(t))
        throw DomainError("session_likelihood: anchor shorter than depth");

    // Work relative to the prior mean.
    const double m0 = env.m0();
    const Environment centred = env.with_prior_mean(0.0).with_outside_option(env.x_b() - m0);
    const double xb = centred.x_b();
    const double sf = opts.sigma_f;
    const double sf2 = sf * sf;
    std::vector<double> F(t), A(t);
    for (int i = 0; i < t; ++i) {
        F[i] = means[i] - m0;
        A[i] = opts.anchor ? (*opts.anchor)[i] - m0 : F[i];
    }

    SessionLikelihood out;
    out.grad_mean.assign(t, 0.0);
    const BeliefState start = initial_state(centred);
    if (should_stop(start, table)) {
        out.underflow = true;
        return out;
    }

    auto inner = [&](const BeliefState& s, double best, int argmax, std::span<const double> hist) {
        StoppingSet set = stopping_set_at(s, centred, table);
        if (J) {
            if (*J == t) set = set.intersected({best, kInf});
            else if (*J == 0) set = set.intersected({-kInf, xb});
            else set = set.intersected({-kInf, hist[*J - 1]});
            (void)argmax;
        }
        return set;
    };

    if (t == 1) {
        const StoppingSet set = inner(start, xb, 0, {});
        out.value = set.gaussian_mass(F[0], sf);
        out.grad_mean[0] = set.gaussian_mass_dmean(F[0], sf);
        out.underflow = !(out.value > opts.floor);
        return out;
    }

    RandomStream rng(opts.seed, session, opts.epoch);
    std::vector<double> x(t - 1);
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> grad(t, 0.0);
    for (std::size_t k = 0; k < opts.n; ++k) {
        for (int i = 0; i < t - 1; ++i) x[i] = A[i] + sf * rng.normal();
        BeliefState s = start;
        double best = xb;
        int argmax = 0;
        bool alive = true;
        for (int i = 0; i < t - 1 && alive; ++i) {
            s = update(s, x[i], centred);
            if (x[i] > best) {
                best = x[i];
                argmax = i + 1;
            }
            alive = !should_stop(s, table);
        }
        if (!alive) continue;
        if (J && *J < t && argmax != *J) continue;
        double w = 1.0;
        if (opts.anchor) {
            double lw = 0.0;
            for (int i = 0; i < t - 1; ++i) lw += ((x[i] - A[i]) * (x[i] - A[i]) - (x[i] - F[i]) * (x[i] - F[i])) / (2.0 * sf2);
            w = std::exp(lw);
        }
        const StoppingSet set = inner(s, best, argmax, x);
        const double term = w * set.gaussian_mass(F[t - 1], sf);
        sum += term;
        sum_sq += term * term;
        for (int i = 0; i < t - 1; ++i) grad[i] += term * (x[i] - F[i]) / sf2;
        grad[t - 1] += w * set.gaussian_mass_dmean(F[t - 1], sf);
    }
    const double n = static_cast<double>(opts.n);
    out.value = sum / n;
    out.std_error = std::sqrt(std::max(0.0, sum_sq / n - out.value * out.value) / n);
    for (int i = 0; i < t; ++i) out.grad_mean[i] = grad[i] / n;
    out.underflow = !(out.value > opts.floor);
    return out;
}

SessionLikelihood session_likelihood(const SessionRecord& record, const FeatureModel& model,
                                     std::span<const double> beta, const Environment& env, const PolicyTable& table,
                                     const EstimatorOptions& opts, std::uint64_t session) {
    if (record.depth < 1 || record.depth > static_cast<int>(record.features.size()))
        throw DomainError("session_likelihood: depth outside the recorded ranks");
    std::vector<double> means(record.depth);
    for (int i = 0; i < record.depth; ++i) means[i] = model.predict(beta, record.features[i]);
    return session_likelihood(means, record.depth, record.J, env, table, opts, session);
}

namespace {

PolicyTable build_table(const Environment& env, const NllOptions& opts) {
    return opts.policy == PolicyKind::optimal ? optimal_table(env, opts.solver) : myopic_table(env);
}

// Sum of log-likelihoods over `included` sessions at perturbed primitives; sessions whose
// perturbed estimate vanishes are left out of both sides by the caller.
std::vector<double> log_liks(std::span<const SessionRecord> records, const std::vector<std::vector<double>>& means,
                             const Environment& env, const NllOptions& opts,
                             const std::function<EstimatorOptions(std::size_t)>& estimator_for) {
    const PolicyTable table = build_table(env, opts);
    std::vector<double> out(records.size(), -kInf);
    run(opts.executor, records.size(), [&](std::size_t n) {
        const auto sl = session_likelihood(means[n], records[n].depth, records[n].J, env, table, estimator_for(n), n);
        if (!sl.underflow) out[n] = std::log(sl.value);
    });
    return out;
}

}  // namespace

NllResult nll_objective(std::span<const SessionRecord> records, const FeatureModel& model,
                        std::span<const double> beta, const UserPrimitives& prims,
                        std::span<const double> alpha, const NllOptions& opts) {
    const std::size_t P = model.num_params();
    NllResult res;
    res.calibration = opts.calibration ? *opts.calibration : calibrate(records, model, beta, alpha);
    const Environment env = user_environment(prims, res.calibration, alpha);
    require_interior(env, "nll_objective");
    const PolicyTable table = build_table(env, opts);

    std::vector<std::vector<double>> means(records.size()), anchors;
    if (opts.anchor_beta) anchors.resize(records.size());
    for (std::size_t n = 0; n < records.size(); ++n) {
        const auto& r = records[n];
        if (r.depth < 1 || r.depth > static_cast<int>(r.features.size()))
            throw DomainError("nll_objective: depth outside the recorded ranks");
        means[n].resize(r.depth);
        for (int i = 0; i < r.depth; ++i) means[n][i] = model.predict(beta, r.features[i]);
        if (opts.anchor_beta) {
            anchors[n].resize(r.depth);
            for (int i = 0; i < r.depth; ++i) anchors[n][i] = model.predict(*opts.anchor_beta, r.features[i]);
        }
    }
    auto estimator_for = [&](std::size_t n) {
        EstimatorOptions e = opts.estimator;
        if (opts.anchor_beta) e.anchor = anchors[n];
        return e;
    };

    res.log_lik.assign(records.size(), -kInf);
    std::vector<std::vector<double>> grads(records.size());
    run(opts.executor, records.size(), [&](std::size_t n) {
        const auto sl = session_likelihood(means[n], records[n].depth, records[n].J, env, table, estimator_for(n), n);
        if (sl.underflow) return;
        res.log_lik[n] = std::log(sl.value);
        std::vector<double>& g = grads[n];
        g.assign(P, 0.0);
        std::vector<double> jac(P);
        for (int i = 0; i < records[n].depth; ++i) {
            model.jacobian(beta, records[n].features[i], jac);
            const double dlog = sl.grad_mean[i] / sl.value;
            for (std::size_t p = 0; p < P; ++p) g[p] -= dlog * jac[p];
        }
    });

    res.grad_beta.assign(P, 0.0);
    for (std::size_t n = 0; n < records.size(); ++n) {
        if (res.log_lik[n] == -kInf) {
            ++res.excluded;
            continue;
        }
        res.value -= res.log_lik[n];
        for (std::size_t p = 0; p < P; ++p) res.grad_beta[p] += grads[n][p];
    }

    if (opts.prim_gradient) {
        for (int k = 0; k < 2; ++k) {
            const double h = k == 0 ? std::min(opts.fd_step, 0.5 * prims.c) : opts.fd_step;
            UserPrimitives up = prims, dn = prims;
            (k == 0 ? up.c : up.x_b) += h;
            (k == 0 ? dn.c : dn.x_b) -= h;
            const Environment env_up = user_environment(up, res.calibration, alpha);
            const Environment env_dn = user_environment(dn, res.calibration, alpha);
            if (!env_up.is_interior() || !env_dn.is_interior())
                throw NonInteriorError("nll_objective: finite-difference step leaves the interior region");
            const auto lu = log_liks(records, means, env_up, opts, estimator_for);
            const auto ld = log_liks(records, means, env_dn, opts, estimator_for);
            double diff = 0.0;
            for (std::size_t n = 0; n < records.size(); ++n)
                if (res.log_lik[n] != -kInf && lu[n] != -kInf && ld[n] != -kInf) diff -= lu[n] - ld[n];
            res.grad_prims[k] = diff / (2.0 * h);
        }
    }
    return res;
}

FitResult fit(std::span<const SessionRecord> records, const FeatureModel& model, std::span<const double> beta_init,
              const UserPrimitives& prims_init, std::span<const double> alpha, const FitOptions& opts) {
    if (records.empty()) throw DomainError("fit: no sessions");
    FitResult res;
    res.beta.assign(beta_init.begin(), beta_init.end());
    res.prims = prims_init;
    NllOptions nll_opts = opts.nll;
    nll_opts.prim_gradient = opts.fit_prims;
    const std::uint64_t base_epoch = opts.nll.estimator.epoch;

    auto fail = [&](const std::string& why) {
        std::ostringstream msg;
        msg << "fit: " << why << "; trace:";
        for (const auto& e : res.trace) msg << " [" << e.epoch << ": nll=" << e.nll << "]";
        throw NumericalError(msg.str());
    };

    auto evaluate = [&](int epoch, const std::vector<double>& beta, const UserPrimitives& prims) {
        nll_opts.estimator.epoch = opts.resample_each_epoch ? base_epoch + static_cast<std::uint64_t>(epoch) : base_epoch;
        NllResult r = nll_objective(records, model, beta, prims, alpha, nll_opts);
        if (!std::isfinite(r.value)) fail("objective is not finite");
        if (r.excluded == records.size()) fail("every session has zero estimated likelihood");
        return r;
    };

    std::vector<double> m1(res.beta.size() + 2, 0.0), m2(res.beta.size() + 2, 0.0);
    NllResult r = evaluate(0, res.beta, res.prims);
    for (int epoch = 0;; ++epoch) {
        res.trace.push_back({epoch, r.value, res.beta, res.prims.c, res.prims.x_b});
        res.nll = r.value;
        const int e = static_cast<int>(res.trace.size()) - 1;
        if (e >= opts.window) {
            const double past = res.trace[e - opts.window].nll;
            if (std::abs(r.value - past) <= opts.tol * std::abs(past)) {
                res.converged = true;
                break;
            }
        }
        if (epoch + 1 >= opts.max_epochs) break;

        const std::size_t P = res.beta.size();
        const double per = 1.0 / static_cast<double>(records.size() - r.excluded);
        std::vector<double> grad(P + 2, 0.0);
        for (std::size_t p = 0; p < P; ++p) grad[p] = per * r.grad_beta[p];
        if (opts.fit_prims) {
            grad[P] = per * r.grad_prims[0];
            grad[P + 1] = per * r.grad_prims[1];
        }
        std::vector<double> step(P + 2);
        const double progress = opts.max_epochs > 1 ? static_cast<double>(epoch) / (opts.max_epochs - 1) : 0.0;
        const double lr = opts.learning_rate * (1.0 - (1.0 - opts.final_lr_fraction) * progress);
        if (opts.optimizer == Optimizer::adam) {
            const double k = static_cast<double>(epoch + 1);
            for (std::size_t p = 0; p < P + 2; ++p) {
                m1[p] = opts.adam_beta1 * m1[p] + (1.0 - opts.adam_beta1) * grad[p];
                m2[p] = opts.adam_beta2 * m2[p] + (1.0 - opts.adam_beta2) * grad[p] * grad[p];
                const double mh = m1[p] / (1.0 - std::pow(opts.adam_beta1, k));
                const double vh = m2[p] / (1.0 - std::pow(opts.adam_beta2, k));
                step[p] = lr * mh / (std::sqrt(vh) + opts.adam_eps);
            }
        } else {
            for (std::size_t p = 0; p < P + 2; ++p) step[p] = lr * grad[p];
        }

        // Halve the step until the calibrated user stays inside the interior region.
        for (double frac = 1.0;; frac *= 0.5) {
            std::vector<double> beta = res.beta;
            UserPrimitives prims = res.prims;
            for (std::size_t p = 0; p < P; ++p) beta[p] -= frac * step[p];
            if (opts.fit_prims) {
                prims.c = std::max(prims.c - frac * step[P], 1e-6);
                prims.x_b -= frac * step[P + 1];
            }
            for (double b : beta)
                if (!std::isfinite(b)) fail("parameters diverged");
            try {
                r = evaluate(epoch + 1, beta, prims);
            } catch (const NonInteriorError&) {
                if (frac < 1e-6) throw;
                continue;
            }
            res.beta = std::move(beta);
            res.prims = prims;
            break;
        }
    }
    return res;
}

std::string to_string(Optimizer optimizer) {
    return optimizer == Optimizer::adam ? "adam" : "gradient-descent";
}

Optimizer optimizer_from_string(const std::string& s) {
    if (s == "adam") return Optimizer::adam;
    if (s == "gradient-descent") return Optimizer::gradient_descent;
    throw ConfigError("unknown optimizer '" + s + "'");
}

}  // namespace standout
