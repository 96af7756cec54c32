#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "standout/environment.hpp"
#include "standout/policy.hpp"

namespace standout {

/// Score model F(beta; w). Parameters are passed explicitly so one model object can be
/// evaluated at many points.
class FeatureModel {
public:
    virtual ~FeatureModel() = default;
    virtual std::size_t num_params() const = 0;
    virtual double predict(std::span<const double> beta, std::span<const double> w) const = 0;
    /// dF/dbeta into out (size num_params()).
    virtual void jacobian(std::span<const double> beta, std::span<const double> w, std::span<double> out) const = 0;
};

/// beta . w, plus a trailing intercept parameter when enabled.
class AffineFeatureModel final : public FeatureModel {
public:
    AffineFeatureModel(std::size_t features, bool intercept) : features_(features), intercept_(intercept) {}
    std::size_t num_params() const override { return features_ + (intercept_ ? 1 : 0); }
    double predict(std::span<const double> beta, std::span<const double> w) const override;
    void jacobian(std::span<const double> beta, std::span<const double> w, std::span<double> out) const override;

private:
    std::size_t features_;
    bool intercept_;
};

/// Wraps an externally supplied predict/jacobian pair.
class FunctionFeatureModel final : public FeatureModel {
public:
    using Predict = std::function<double(std::span<const double>, std::span<const double>)>;
    using Jacobian = std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;
    FunctionFeatureModel(std::size_t params, Predict predict, Jacobian jacobian)
        : params_(params), predict_(std::move(predict)), jacobian_(std::move(jacobian)) {}
    std::size_t num_params() const override { return params_; }
    double predict(std::span<const double> beta, std::span<const double> w) const override {
        return predict_(beta, w);
    }
    void jacobian(std::span<const double> beta, std::span<const double> w, std::span<double> out) const override {
        jacobian_(beta, w, out);
    }

private:
    std::size_t params_;
    Predict predict_;
    Jacobian jacobian_;
};

struct SessionRecord {
    std::vector<std::vector<double>> features;  // ranks 1..N
    int depth = 1;
    std::optional<int> J;                       // 0 = outside option
};

/// User-side parameters estimated with the model, in units of the residual SD (sigma_F = 1).
struct UserPrimitives {
    double c = 0.1;
    double x_b = 0.0;
};

struct Calibration {
    double v0 = 0.0;
    double sigma_eta2 = 0.0;
};

/// v0 = variance across sessions of mean_i (F_i - alpha_i); sigma_eta^2 = mean within-session
/// variance of (F_i - alpha_i) plus one. Population (1/n) variances throughout.
/// Throws CalibrationError if v0 is not positive, DomainError on malformed records.
Calibration calibrate(std::span<const SessionRecord> records, const FeatureModel& model,
                      std::span<const double> beta, std::span<const double> alpha);

/// Environment of a calibrated user: m0 = 0, rank shifts alpha.
Environment user_environment(const UserPrimitives& prims, const Calibration& cal, std::span<const double> alpha);

struct EstimatorOptions {
    std::size_t n = 4096;     // outer samples per session
    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;  // RNG streams are keyed by (seed, session, epoch)
    double sigma_f = 1.0;     // SD of relevance around the model score
    double floor = 1e-300;
    /// Centre of the sample points. Defaults to the means themselves; fixing it while the means
    /// move reweights the same points by the density ratio, which makes the estimate smooth in
    /// the means and gives grad_mean as its exact derivative.
    std::optional<std::vector<double>> anchor;
};

struct SessionLikelihood {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<double> grad_mean;  // d value / d F_i, i = 1..depth
    bool underflow = false;
};

/// Likelihood of depth t (and conversion J if given) for relevances x_i ~ N(means_i, sigma_f^2).
/// Computed relative to the prior mean, so a joint shift of m0, x_b and means cancels before
/// sampling. Throws DomainError if J > t or t is outside 1..N.
SessionLikelihood session_likelihood(std::span<const double> means, int depth, std::optional<int> J,
                                     const Environment& env, const PolicyTable& table,
                                     const EstimatorOptions& opts, std::uint64_t session);

/// Same, with means from a feature model.
SessionLikelihood session_likelihood(const SessionRecord& record, const FeatureModel& model,
                                     std::span<const double> beta, const Environment& env, const PolicyTable& table,
                                     const EstimatorOptions& opts, std::uint64_t session);

/// Runs body(i) for i in [0, count). Empty means a serial loop; callers that want parallel
/// evaluation supply their own. Results never depend on the schedule.
using Executor = std::function<void(std::size_t count, const std::function<void(std::size_t)>& body)>;

struct NllOptions {
    EstimatorOptions estimator;
    PolicyKind policy = PolicyKind::optimal;
    SolverOptions solver;
    double fd_step = 1e-3;                 // central differences in (c, x_b)
    bool prim_gradient = true;
    std::optional<Calibration> calibration;  // fixed instead of recomputed from beta
    /// Centres every session's samples at the means under these coefficients (see
    /// EstimatorOptions::anchor), so the objective is smooth in beta near the anchor.
    std::optional<std::vector<double>> anchor_beta;
    Executor executor;
};

struct NllResult {
    double value = 0.0;
    std::vector<double> grad_beta;
    std::array<double, 2> grad_prims{0.0, 0.0};  // (c, x_b)
    Calibration calibration;
    std::vector<double> log_lik;                 // per session; -inf when excluded
    std::size_t excluded = 0;
};

/// -sum_n log l_n with the chain-rule gradient in beta (calibration held at its current value)
/// and CRN central differences in (c, x_b); the step in c shrinks to c / 2 near zero. Throws NonInteriorError if the calibrated user
/// violates the interior condition.
NllResult nll_objective(std::span<const SessionRecord> records, const FeatureModel& model,
                        std::span<const double> beta, const UserPrimitives& prims,
                        std::span<const double> alpha, const NllOptions& opts);

enum class Optimizer { gradient_descent, adam };

struct FitOptions {
    NllOptions nll;
    int max_epochs = 200;
    Optimizer optimizer = Optimizer::adam;
    double learning_rate = 0.05;  // applied to the gradient of the per-session mean objective
    double final_lr_fraction = 0.1;  // linear decay of the step size to this fraction at max_epochs
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double tol = 1e-5;            // relative NLL change over `window` epochs
    int window = 10;
    bool fit_prims = true;
    bool resample_each_epoch = true;
};

struct FitTraceEntry {
    int epoch = 0;
    double nll = 0.0;
    std::vector<double> beta;
    double c = 0.0;
    double x_b = 0.0;
};

struct FitResult {
    std::vector<double> beta;
    UserPrimitives prims;
    double nll = 0.0;
    bool converged = false;
    std::vector<FitTraceEntry> trace;
};

/// First-order descent on the per-session mean objective over (beta, c, x_b). A step that would leave the interior region is
/// halved until it does not. Throws NumericalError (with the trace in the message) if the
/// objective stops being finite or every session drops out.
std::string to_string(Optimizer optimizer);
Optimizer optimizer_from_string(const std::string& s);

FitResult fit(std::span<const SessionRecord> records, const FeatureModel& model, std::span<const double> beta_init,
              const UserPrimitives& prims_init, std::span<const double> alpha, const FitOptions& opts);

}  // namespace standout
