#include "edamcc/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace edamcc {

namespace {

void require_samples(const Eigen::MatrixXd& data, const char* what) {
    if (data.rows() < 2)
        throw std::invalid_argument(std::string(what) + ": at least two samples are required");
}

Eigen::VectorXd standard_normal_vector(Eigen::Index d, Engine& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i)
        z[i] = normal(rng);
    return z;
}

// Symmetric ML scatter matrix of already-centered rows.
Eigen::MatrixXd scatter(const Eigen::MatrixXd& centered) {
    const Eigen::Index d = centered.cols();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(centered.rows()));
    return cov.selfadjointView<Eigen::Lower>();
}

bool usable_factor(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success)
        return false;
    const auto diag = llt.matrixLLT().diagonal();
    return diag.allFinite() && (diag.array() > 0.0).all();
}

} // namespace

UnivariateGaussianSet fit_univariate(const Eigen::MatrixXd& data) {
    require_samples(data, "fit_univariate");
    const double m = static_cast<double>(data.rows());
    UnivariateGaussianSet model;
    model.means.resize(data.cols());
    model.std_devs.resize(data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const double mu = data.col(j).sum() / m;
        const double var = (data.col(j).array() - mu).square().sum() / m;
        model.means[j] = mu;
        model.std_devs[j] = std::sqrt(var);
    }
    return model;
}

Eigen::VectorXd draw_univariate(const UnivariateGaussianSet& model, Engine& rng) {
    Eigen::VectorXd z = standard_normal_vector(model.means.size(), rng);
    return model.means + z.cwiseProduct(model.std_devs);
}

Eigen::VectorXd sample_univariate(const UnivariateGaussianSet& model, Engine& rng, const Bounds& bounds) {
    if (bounds.dimension() != model.dimension())
        throw std::invalid_argument("sample_univariate: model and bounds dimensions differ");
    Eigen::VectorXd x = draw_univariate(model, rng);
    bounds.repair(x);
    return x;
}

MultivariateGaussian fit_multivariate(const Eigen::MatrixXd& data) {
    require_samples(data, "fit_multivariate");
    MultivariateGaussian model;
    model.mean = data.colwise().mean().transpose();
    model.covariance = scatter(data.rowwise() - model.mean.transpose());
    return model;
}

MultivariateGaussian cholesky_factor(MultivariateGaussian model) {
    const Eigen::MatrixXd& sigma = model.covariance;
    const Eigen::Index d = sigma.rows();
    if (sigma.cols() != d || model.mean.size() != d)
        throw std::invalid_argument("cholesky_factor: covariance must be square and match the mean");

    if (sigma.isZero(0.0)) {
        model.factor = Eigen::MatrixXd::Zero(d, d);
        model.jitter_applied = 0.0;
        return model;
    }

    const double scale = sigma.trace() / static_cast<double>(d);
    if (!(scale > 0.0) || !sigma.allFinite())
        throw FactorizationError("cholesky_factor: covariance has non-positive trace or non-finite entries");

    constexpr std::array<double, 4> ladder{0.0, 1e-10, 1e-8, 1e-6};
    for (double level : ladder) {
        const double jitter = level * scale;
        Eigen::MatrixXd regularized = sigma;
        regularized.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(regularized);
        if (usable_factor(llt)) {
            model.factor = llt.matrixL().toDenseMatrix();
            model.jitter_applied = jitter;
            return model;
        }
    }
    throw FactorizationError("cholesky_factor: covariance not positive definite even with jitter " +
                             std::to_string(ladder.back() * scale));
}

Eigen::VectorXd draw_multivariate(const MultivariateGaussian& model, Engine& rng) {
    if (!model.factor)
        throw std::invalid_argument("sample_multivariate: model has no factor");
    const Eigen::VectorXd z = standard_normal_vector(model.mean.size(), rng);
    return model.mean + model.factor->triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_multivariate(const MultivariateGaussian& model, Engine& rng, const Bounds& bounds) {
    if (bounds.dimension() != model.dimension())
        throw std::invalid_argument("sample_multivariate: model and bounds dimensions differ");
    Eigen::VectorXd x = draw_multivariate(model, rng);
    bounds.repair(x);
    return x;
}

CorrelationMatrix correlation_from_data(const Eigen::MatrixXd& data) {
    require_samples(data, "correlation_from_data");
    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd cov = scatter(data.rowwise() - mean);
    const Eigen::Index n = cov.rows();

    Eigen::VectorXd sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    CorrelationMatrix out;
    out.source_sample_size = static_cast<std::size_t>(data.rows());
    out.entries.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            double c;
            if (i == j)
                c = 1.0;
            else if (sd[i] == 0.0 || sd[j] == 0.0)
                c = 0.0;
            else
                c = std::clamp(cov(i, j) / (sd[i] * sd[j]), -1.0, 1.0);
            out.entries(i, j) = c;
            out.entries(j, i) = c;
        }
    }
    return out;
}

MultivariateGaussian eeda_scale(MultivariateGaussian model) {
    const Eigen::Index d = model.covariance.rows();
    model.factor.reset();
    model.jitter_applied = 0.0;
    model.scaling_skipped = false;
    if (d == 0)
        return model;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.covariance);
    if (eig.info() != Eigen::Success)
        throw FactorizationError("eeda_scale: eigendecomposition failed");

    Eigen::VectorXd lambda = eig.eigenvalues();
    const double lambda_max = lambda.maxCoeff();
    if (!(lambda_max > 0.0)) {
        model.scaling_skipped = true;
        return model;
    }

    lambda = lambda.cwiseMax(1e-12 * lambda_max);
    const double lambda_min = lambda.minCoeff();
    const double tie = 1e-9 * lambda_max;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (lambda[i] - lambda_min <= tie)
            lambda[i] = lambda_max;
    }

    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::MatrixXd scaled = v * lambda.asDiagonal() * v.transpose();
    model.covariance = 0.5 * (scaled + scaled.transpose());
    return model;
}

} // namespace edamcc
