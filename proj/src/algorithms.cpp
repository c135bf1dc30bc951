#include "edamcc/algorithms.hpp"

#include <array>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace edamcc {

namespace {

constexpr std::array<std::pair<Algorithm, const char*>, 7> kAlgorithmNames{{
    {Algorithm::umda, "umda"},
    {Algorithm::emna, "emna"},
    {Algorithm::eeda, "eeda"},
    {Algorithm::eda_mcc, "eda-mcc"},
    {Algorithm::eda_mcc_gc, "eda-mcc-gc"},
    {Algorithm::eda_mcc_wi_only, "eda-mcc-wi-only"},
    {Algorithm::eda_mcc_sm_only, "eda-mcc-sm-only"},
}};

} // namespace

std::string to_string(Algorithm algorithm) {
    for (const auto& [a, name] : kAlgorithmNames) {
        if (a == algorithm)
            return name;
    }
    throw std::invalid_argument("unknown algorithm enumerator");
}

Algorithm parse_algorithm(const std::string& text) {
    for (const auto& [a, name] : kAlgorithmNames) {
        if (text == name)
            return a;
    }
    throw std::invalid_argument("algorithm: unknown value '" + text + "'");
}

bool is_mcc_family(Algorithm algorithm) {
    return algorithm != Algorithm::umda && algorithm != Algorithm::emna && algorithm != Algorithm::eeda;
}

void UmdaStrategy::build(const Eigen::MatrixXd& selected, const StreamSet&) {
    model_ = fit_univariate(selected);
}

Eigen::VectorXd UmdaStrategy::sample(Engine& rng, const Bounds& bounds) const {
    return sample_univariate(model_, rng, bounds);
}

void GlobalGaussianStrategy::build(const Eigen::MatrixXd& selected, const StreamSet&) {
    MultivariateGaussian g = fit_multivariate(selected);
    if (scaled_)
        g = eeda_scale(std::move(g));
    model_ = cholesky_factor(std::move(g));
}

Eigen::VectorXd GlobalGaussianStrategy::sample(Engine& rng, const Bounds& bounds) const {
    return sample_multivariate(model_, rng, bounds);
}

std::vector<std::size_t> GlobalGaussianStrategy::strong_variables() const {
    std::vector<std::size_t> all(model_.dimension());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
}

void MccStrategy::build(const Eigen::MatrixXd& selected, const StreamSet& streams) {
    model_ = build_composite(selected, config_, streams);
}

Eigen::VectorXd MccStrategy::sample(Engine& rng, const Bounds& bounds) const {
    return sample_composite(model_, rng, bounds);
}

std::unique_ptr<ModelStrategy> make_strategy(Algorithm algorithm, const MccConfig& mcc) {
    MccConfig cfg = mcc;
    switch (algorithm) {
    case Algorithm::umda:
        return std::make_unique<UmdaStrategy>();
    case Algorithm::emna:
        return std::make_unique<GlobalGaussianStrategy>(false);
    case Algorithm::eeda:
        return std::make_unique<GlobalGaussianStrategy>(true);
    case Algorithm::eda_mcc:
        cfg.partition_mode = PartitionMode::random;
        cfg.wi_enabled = cfg.sm_enabled = true;
        break;
    case Algorithm::eda_mcc_gc:
        cfg.partition_mode = PartitionMode::greedy;
        cfg.wi_enabled = cfg.sm_enabled = true;
        break;
    case Algorithm::eda_mcc_wi_only:
        cfg.wi_enabled = true;
        cfg.sm_enabled = false;
        break;
    case Algorithm::eda_mcc_sm_only:
        cfg.partition_mode = PartitionMode::random;
        cfg.wi_enabled = false;
        cfg.sm_enabled = true;
        break;
    }
    return std::make_unique<MccStrategy>(cfg, to_string(algorithm));
}

} // namespace edamcc
