#pragma once

#include <vector>

namespace standout {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

/// Standard normal density.
double std_normal_pdf(double d);

/// Standard normal CDF, accurate in both tails.
double std_normal_cdf(double d);

/// Inverse of the standard normal CDF. Throws DomainError unless 0 < p < 1.
double std_normal_quantile(double p);

/// Option-value function g(d) = phi(d) - d * Phi(-d).
double g(double d);

/// Inverse of g on (0, inf). Throws DomainError for y <= 0.
double g_inverse(double y);

/// E[(X - threshold)^+] for X ~ N(mean, sd^2). Throws DomainError for sd <= 0.
double gaussian_upside(double mean, double sd, double threshold);

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule; results are cached per n.
const GaussLegendre& gauss_legendre(int n);

}  // namespace standout
