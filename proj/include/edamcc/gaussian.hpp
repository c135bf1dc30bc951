#pragma once

/// @file gaussian.hpp
/// @brief Maximum-likelihood Gaussian fitting, correlation estimation,
/// triangular-factor sampling and the EEDA eigenvalue rescaling.
///
/// Data matrices are m x d with one sample per row. All variances and
/// covariances use the maximum-likelihood divisor m.

#include <cstddef>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>

#include "edamcc/core.hpp"
#include "edamcc/rng.hpp"

namespace edamcc {

struct UnivariateGaussianSet {
    Eigen::VectorXd means;
    Eigen::VectorXd std_devs;

    std::size_t dimension() const { return static_cast<std::size_t>(means.size()); }
};

struct MultivariateGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    std::optional<Eigen::MatrixXd> factor; // lower triangular H, H H^T = covariance + jitter * I
    double jitter_applied = 0.0;
    bool scaling_skipped = false; // set by eeda_scale on a zero covariance

    std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }
};

struct CorrelationMatrix {
    Eigen::MatrixXd entries;
    std::size_t source_sample_size = 0;

    std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
};

class FactorizationError : public StrategyError {
public:
    using StrategyError::StrategyError;
};

UnivariateGaussianSet fit_univariate(const Eigen::MatrixXd& data);

/// x_i = mu_i + zeta_i * sigma_i, clipped into `bounds`.
Eigen::VectorXd sample_univariate(const UnivariateGaussianSet& model, Engine& rng, const Bounds& bounds);

/// Same draw without the bound repair; for callers that scatter coordinates
/// into a larger vector and repair once.
Eigen::VectorXd draw_univariate(const UnivariateGaussianSet& model, Engine& rng);

MultivariateGaussian fit_multivariate(const Eigen::MatrixXd& data);

/// Lower-triangular factor of the covariance. Singular or slightly indefinite
/// matrices get a diagonal jitter from the ladder
/// {0, 1e-10, 1e-8, 1e-6} x trace/d; the level used is stored in jitter_applied.
/// Throws FactorizationError when the largest jitter still fails.
MultivariateGaussian cholesky_factor(MultivariateGaussian model);

/// x = mu + H zeta, clipped into `bounds`. Throws std::invalid_argument when the
/// model has no factor.
Eigen::VectorXd sample_multivariate(const MultivariateGaussian& model, Engine& rng, const Bounds& bounds);

Eigen::VectorXd draw_multivariate(const MultivariateGaussian& model, Engine& rng);

/// Pearson correlation. A zero-variance variable gets zero off-diagonal
/// entries and a unit diagonal.
CorrelationMatrix correlation_from_data(const Eigen::MatrixXd& data);

/// Raises the smallest eigenvalue (and every eigenvalue within 1e-9 * lambda_max
/// of it) to the largest eigenvalue. Negative eigenvalues are first clamped to
/// 1e-12 * lambda_max. The factor is dropped. A zero matrix is returned as is
/// with scaling_skipped set.
MultivariateGaussian eeda_scale(MultivariateGaussian model);

} // namespace edamcc
