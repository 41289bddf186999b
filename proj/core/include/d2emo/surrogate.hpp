#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "d2emo/core.hpp"

namespace d2emo {

/// Hyperparameter search box for γ and ℓ.
inline constexpr double kHyperMin = 1e-5;
inline constexpr double kHyperMax = 1e5;

/// RBF kernel k(x, x') = gamma * exp(-||x - x'||^2 / ell).
/// ell carries squared-distance units. sigma_n is kept at zero; numerical
/// jitter is applied separately when factorizing.
struct KernelParams {
    double gamma = 1.0;
    double ell = 1.0;
    double sigma_n = 0.0;

    friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

double kernel(std::span<const double> x, std::span<const double> x2, const KernelParams& params);

/// Raised when the covariance matrix cannot be factorized, even after jitter
/// escalation, for every candidate hyperparameter setting.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Standardization {
    double mean = 0.0;
    double scale = 1.0;
};

struct FitOptions {
    std::size_t starts = 8;
    std::size_t evaluations_per_start = 200;
    /// Restrict ell to values whose jittered mean still interpolates the
    /// targets to 1e-6 (standardized units). On clustered designs this
    /// forces ell below the point spacing; turning it off keeps the
    /// likelihood optimum and lets jitter smooth near-duplicates instead.
    bool interpolation_cap = true;
};

/// Log marginal likelihood of the standardized targets under a zero-mean GP.
/// Requires at least two rows in X. Throws FitError if the covariance is not
/// positive definite after jitter escalation.
double log_marginal_likelihood(const KernelParams& params, const std::vector<Vector>& X,
                               std::span<const double> f);

/// Standardization used by fit(): population mean/std, with std below 1e-12
/// replaced by 1 (constant model).
Standardization standardize(std::span<const double> f);

/// A noiseless zero-mean GP on standardized targets.
class GpSurrogate {
public:
    /// Maximizes the log marginal likelihood over (gamma, ell) in the search
    /// box with deterministic multi-start coordinate-wise golden-section search
    /// in log10 space. Requires N >= 2.
    static GpSurrogate fit(const std::vector<Vector>& X, std::span<const double> f,
                           const FitOptions& options = {});

    /// Conditions a GP with fixed hyperparameters and standardization on (X, f).
    static GpSurrogate condition(const KernelParams& params, const std::vector<Vector>& X,
                                 std::span<const double> f, Standardization standardization);

    double predict_mean(std::span<const double> z) const;
    double predict_variance(std::span<const double> z) const;
    Vector grad_mean(std::span<const double> z) const;

    /// Mean and its gradient sharing one pass over the cross-covariances.
    double mean_and_gradient(std::span<const double> z, std::span<double> gradient) const;

    const KernelParams& params() const noexcept { return params_; }
    const Standardization& standardization() const noexcept { return standardization_; }
    double jitter() const noexcept { return jitter_; }
    bool is_constant() const noexcept { return constant_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(X_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(X_.cols()); }
    std::vector<Vector> training_inputs() const;
    const Vector& training_targets() const noexcept { return targets_; }
    const Eigen::VectorXd& weights() const noexcept { return alpha_; }
    Eigen::MatrixXd cholesky_factor() const { return chol_.matrixL(); }

    /// Regularized covariance K + jitter*I in standardized units.
    Eigen::MatrixXd covariance() const;

    /// JSON dump of params, training data, and standardization constants.
    std::string to_json() const;
    static GpSurrogate from_json(const std::string& text);

private:
    GpSurrogate() = default;

    void cross_covariance(std::span<const double> z, Eigen::VectorXd& k) const;

    KernelParams params_;
    Standardization standardization_;
    bool constant_ = false;
    double jitter_ = 0.0;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X_;
    Vector targets_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
};

}  // namespace d2emo
