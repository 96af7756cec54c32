#include "standout/belief.hpp"

#include <algorithm>

#include "standout/errors.hpp"

namespace standout {

BeliefState initial_state(const Environment& env) {
    return BeliefState{0, env.m0(), env.v0(), env.x_b(), env.x_b() - env.m0()};
}

BeliefState update(const BeliefState& state, double x_next, const Environment& env) {
    if (state.t >= env.N()) throw HorizonError("update: no rank left to inspect");
    BeliefState next;
    next.t = state.t + 1;
    next.v = env.posterior_variance(next.t);
    next.m = (next.v / state.v) * state.m + (next.v / env.sigma_eta2()) * (x_next - env.alpha(next.t));
    next.M = std::max(state.M, x_next);
    next.L = next.M - next.m;
    return next;
}

Predictive predictive(const BeliefState& state, const Environment& env) {
    if (state.t >= env.N()) throw HorizonError("predictive: no rank left to inspect");
    return {state.m + env.alpha(state.t + 1), state.v + env.sigma_eta2()};
}

double bayes_weight(int t, const Environment& env) {
    if (t < 1) throw DomainError("bayes_weight: t must be at least 1");
    const double v = env.posterior_variance(t - 1);
    return v / (v + env.sigma_eta2());
}

double diffuse_posterior_mean(std::span<const RankedObservation> inspected, const Environment& env) {
    if (inspected.empty()) throw DomainError("diffuse_posterior_mean: empty list");
    double sum = 0.0;
    for (const auto& o : inspected) sum += o.x - env.alpha(o.rank);
    return sum / static_cast<double>(inspected.size());
}

}  // namespace standout
