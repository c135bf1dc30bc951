#pragma once

#include <memory>
#include <string>
#include <vector>

#include "edamcc/core.hpp"
#include "edamcc/gaussian.hpp"
#include "edamcc/mcc.hpp"

namespace edamcc {

enum class Algorithm {
    umda,
    emna,
    eeda,
    eda_mcc,
    eda_mcc_gc,
    eda_mcc_wi_only,
    eda_mcc_sm_only,
};

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);
bool is_mcc_family(Algorithm algorithm);

/// Independent univariate Gaussian per variable.
class UmdaStrategy final : public ModelStrategy {
public:
    std::string name() const override { return "umda"; }
    void build(const Eigen::MatrixXd& selected, const StreamSet& streams) override;
    Eigen::VectorXd sample(Engine& rng, const Bounds& bounds) const override;
    std::vector<std::size_t> strong_variables() const override { return {}; }

    const UnivariateGaussianSet& model() const { return model_; }

private:
    UnivariateGaussianSet model_;
};

/// One full-covariance Gaussian; with `scaled` the EEDA eigenvalue rule is applied.
class GlobalGaussianStrategy final : public ModelStrategy {
public:
    explicit GlobalGaussianStrategy(bool scaled) : scaled_(scaled) {}

    std::string name() const override { return scaled_ ? "eeda" : "emna"; }
    void build(const Eigen::MatrixXd& selected, const StreamSet& streams) override;
    Eigen::VectorXd sample(Engine& rng, const Bounds& bounds) const override;
    std::vector<std::size_t> strong_variables() const override;

    const MultivariateGaussian& model() const { return model_; }

private:
    bool scaled_;
    MultivariateGaussian model_;
};

class MccStrategy final : public ModelStrategy {
public:
    MccStrategy(MccConfig config, std::string name) : config_(config), name_(std::move(name)) {}

    std::string name() const override { return name_; }
    void build(const Eigen::MatrixXd& selected, const StreamSet& streams) override;
    Eigen::VectorXd sample(Engine& rng, const Bounds& bounds) const override;
    std::vector<std::size_t> strong_variables() const override { return model_.partition.strong_set(); }

    const CompositeModel& model() const { return model_; }
    const MccConfig& config() const { return config_; }

private:
    MccConfig config_;
    std::string name_;
    CompositeModel model_;
};

/// MCC-family algorithms override the partition mode and ablation switches of
/// `mcc` to match their variant; the baselines ignore it.
std::unique_ptr<ModelStrategy> make_strategy(Algorithm algorithm, const MccConfig& mcc = {});

} // namespace edamcc
