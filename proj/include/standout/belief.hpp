#pragma once

#include <span>
#include <utility>

#include "standout/environment.hpp"

namespace standout {

/// Posterior over the page mean plus the running maximum and lead.
struct BeliefState {
    int t = 0;       // inspections done
    double m = 0.0;  // posterior mean
    double v = 0.0;  // posterior variance
    double M = 0.0;  // best relevance revealed so far, outside option included
    double L = 0.0;  // lead, M - m
};

struct Predictive {
    double mean = 0.0;
    double variance = 0.0;
};

struct RankedObservation {
    int rank = 1;
    double x = 0.0;
};

BeliefState initial_state(const Environment& env);

/// Conjugate update after observing rank t+1. Throws HorizonError when t >= N.
BeliefState update(const BeliefState& state, double x_next, const Environment& env);

/// Predictive law of the next rank. Throws HorizonError when t >= N.
Predictive predictive(const BeliefState& state, const Environment& env);

/// omega_t = v_{t-1} / (v_{t-1} + sigma_eta^2). Throws DomainError for t < 1.
double bayes_weight(int t, const Environment& env);

/// Bias-corrected sample mean (1/t) sum (x_s - alpha_s). Throws DomainError on empty input.
double diffuse_posterior_mean(std::span<const RankedObservation> inspected, const Environment& env);

}  // namespace standout
