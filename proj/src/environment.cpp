#include "standout/environment.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "standout/errors.hpp"
#include "standout/gaussmath.hpp"

namespace standout {

void EnvironmentParams::validate() const {
    if (N < 1) throw DomainError("N must be at least 1");
    if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) throw DomainError("sigma_x2 must be positive");
    if (!(sigma_e2 > 0.0) || !std::isfinite(sigma_e2)) throw DomainError("sigma_e2 must be positive");
    if (!(v0 > 0.0) || !std::isfinite(v0)) throw DomainError("v0 must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
    if (!std::isfinite(m0) || !std::isfinite(x_b)) throw DomainError("m0 and x_b must be finite");
}

DerivedConstants derive(const EnvironmentParams& params) {
    params.validate();
    DerivedConstants out;
    const double sz2 = params.sigma_x2 + params.sigma_e2;
    out.rho = params.sigma_x2 / sz2;
    out.sigma_z = std::sqrt(sz2);
    out.sigma_eta2 = params.sigma_x2 * (1.0 - out.rho);
    const double n = params.N;
    out.q.resize(params.N);
    out.alpha.resize(params.N);
    for (int i = 1; i <= params.N; ++i) {
        const double p = params.quantile_rule == QuantileRule::midpoint
                             ? 1.0 - i / (n + 1.0)
                             : 1.0 - (i - 0.375) / (n + 0.25);
        out.q[i - 1] = std_normal_quantile(p);
        out.alpha[i - 1] = params.sigma_x2 / out.sigma_z * out.q[i - 1];
    }
    return out;
}

namespace {

Primitives primitives_from(const EnvironmentParams& params) {
    DerivedConstants d = derive(params);
    Primitives p;
    p.alpha = std::move(d.alpha);
    p.sigma_eta2 = d.sigma_eta2;
    p.v0 = params.v0;
    p.m0 = params.m0;
    p.x_b = params.x_b;
    p.c = params.c;
    return p;
}

}  // namespace

Environment::Environment(const EnvironmentParams& params) : Environment(primitives_from(params)) {}

Environment::Environment(Primitives prims) : prims_(std::move(prims)) {
    if (prims_.alpha.empty()) throw DomainError("Environment: need at least one rank");
    for (std::size_t i = 1; i < prims_.alpha.size(); ++i)
        if (!(prims_.alpha[i] < prims_.alpha[i - 1]))
            throw DomainError("Environment: rank shifts must be strictly decreasing");
    if (!(prims_.sigma_eta2 > 0.0)) throw DomainError("Environment: sigma_eta2 must be positive");
    if (!(prims_.v0 > 0.0)) throw DomainError("Environment: v0 must be positive");
    if (!(prims_.c > 0.0)) throw DomainError("Environment: c must be positive");
    sigma_eta_ = std::sqrt(prims_.sigma_eta2);
}

double Environment::posterior_variance(int t) const {
    return 1.0 / (1.0 / prims_.v0 + t / prims_.sigma_eta2);
}

double Environment::predictive_sd(int t) const {
    return std::sqrt(posterior_variance(t) + prims_.sigma_eta2);
}

double Environment::interior_slack() const {
    return gaussian_upside(prims_.m0 + alpha(1), predictive_sd(0), prims_.x_b) - prims_.c;
}

Environment Environment::with_outside_option(double x_b) const {
    Primitives p = prims_;
    p.x_b = x_b;
    return Environment(std::move(p));
}

Environment Environment::with_prior_mean(double m0) const {
    Primitives p = prims_;
    p.m0 = m0;
    return Environment(std::move(p));
}

Environment Environment::with_cost(double c) const {
    Primitives p = prims_;
    p.c = c;
    return Environment(std::move(p));
}

double interior_condition_slack(const EnvironmentParams& params) {
    return Environment(params).interior_slack();
}

void require_interior(const Environment& env, const char* who) {
    if (!env.is_interior())
        throw NonInteriorError(std::string(who) + ": environment violates the interior condition");
}

std::string to_string(QuantileRule rule) {
    return rule == QuantileRule::midpoint ? "midpoint" : "blom";
}

QuantileRule quantile_rule_from_string(const std::string& s) {
    if (s == "midpoint") return QuantileRule::midpoint;
    if (s == "blom") return QuantileRule::blom;
    throw ConfigError("unknown quantile_rule '" + s + "'");
}

}  // namespace standout
