#include "standout/gaussmath.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "standout/errors.hpp"

namespace standout {

double std_normal_pdf(double d) {
    return kInvSqrt2Pi * std::exp(-0.5 * d * d);
}

double std_normal_cdf(double d) {
    return 0.5 * std::erfc(-d * (1.0 / std::numbers::sqrt2));
}

namespace {

// Acklam's rational approximation, relative error about 1.15e-9 before refinement.
double acklam(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
    double x = acklam(p);
    // Two Halley steps; the residual is taken on the smaller tail to avoid cancellation.
    for (int i = 0; i < 2; ++i) {
        const double e = p < 0.5 ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
        const double u = e / std_normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double g(double d) {
    return std_normal_pdf(d) - d * std_normal_cdf(-d);
}

double g_inverse(double y) {
    if (!(y > 0.0)) throw DomainError("g_inverse: y must be positive");
    double lo = -y - 1.0;  // g(lo) > -lo > y
    double hi = 10.0;
    while (g(hi) >= y) {
        hi *= 2.0;
        if (hi > 64.0) throw NumericalError("g_inverse: y below representable range of g");
    }
    // Safeguarded Newton; g' = -Phi(-d) and g is convex, so steps from the left stay bracketed.
    double d = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = g(d) - y;
        if (f > 0.0) lo = d; else hi = d;
        if (f == 0.0 || hi - lo <= 1e-15 * (1.0 + std::abs(d))) break;
        const double slope = -std_normal_cdf(-d);
        double next = slope < 0.0 ? d - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - d) <= 1e-16 * (1.0 + std::abs(d))) {
            d = next;
            break;
        }
        d = next;
    }
    return d;
}

double gaussian_upside(double mean, double sd, double threshold) {
    if (!(sd > 0.0)) throw DomainError("gaussian_upside: sd must be positive");
    return sd * g((threshold - mean) / sd);
}

namespace {

GaussLegendre build_gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

}  // namespace standout
