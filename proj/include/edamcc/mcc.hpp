#pragma once

/// @file mcc.hpp
/// @brief Model complexity control: weak-variable identification, subspace
/// partitioning and the composite (univariate x block-multivariate) model.
///
/// Each generation the selected rows are split into a weakly dependent set W,
/// whose variables get independent univariate Gaussians, and a strongly
/// dependent set S, which is cut into subsets of at most c variables that each
/// get their own multivariate Gaussian. The implied global covariance is block
/// diagonal. Correlations are estimated from an m_corr-row subsample; every
/// model parameter is fitted from all m selected rows.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edamcc/gaussian.hpp"
#include "edamcc/rng.hpp"

namespace edamcc {

enum class BaseModel { emna, eeda };
enum class PartitionMode { random, greedy };

std::string to_string(BaseModel model);
BaseModel parse_base_model(const std::string& text);

struct MccConfig {
    double theta = 0.3;
    std::size_t c = 20;
    std::size_t m_corr = 100;
    BaseModel base_model = BaseModel::eeda;
    PartitionMode partition_mode = PartitionMode::random;
    bool wi_enabled = true;
    bool sm_enabled = true;

    /// Throws std::invalid_argument naming the offending field.
    void validate(std::size_t n) const;
};

struct WeakStrongSplit {
    std::vector<std::size_t> weak;
    std::vector<std::size_t> strong;
};

struct VariablePartition {
    std::vector<std::size_t> weak;
    std::vector<std::vector<std::size_t>> strong_subsets;
    std::vector<std::size_t> leftover_weak; // greedy clustering only

    /// Every variable placed in S by identification: subsets plus leftovers, ascending.
    std::vector<std::size_t> strong_set() const;

    /// Throws std::logic_error unless the three groups are disjoint and cover 0..n-1.
    void validate(std::size_t n) const;
};

struct SubspaceModel {
    std::vector<std::size_t> indices;
    MultivariateGaussian model;
};

struct CompositeModel {
    std::size_t dimension = 0;
    std::vector<std::size_t> weak_indices; // W plus greedy leftovers, ascending
    UnivariateGaussianSet weak_model;
    std::vector<SubspaceModel> subspaces;
    VariablePartition partition;
};

/// i is weak iff |C_ij| <= theta for every j != i.
WeakStrongSplit identify_weak(const CorrelationMatrix& correlation, double theta);

/// Shuffle then cut into consecutive chunks of size c; each chunk is sorted.
std::vector<std::vector<std::size_t>> partition_random(std::span<const std::size_t> strong, std::size_t c,
                                                       Engine& rng);

struct GreedyPartition {
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> leftover_weak;
};

/// Greedy correlation clustering. A cluster is seeded with the unused pair of
/// largest |corr| above theta and grown, while smaller than c, by the unused
/// variable with the largest |corr| above theta to any current member. Ties go
/// to the lowest index. Cluster members are listed in insertion order.
GreedyPartition partition_greedy(std::span<const std::size_t> strong, const CorrelationMatrix& correlation,
                                 double theta, std::size_t c);

/// Uses the subsample and partition substreams of `streams`.
CompositeModel build_composite(const Eigen::MatrixXd& selected, const MccConfig& config, const StreamSet& streams);

Eigen::VectorXd sample_composite(const CompositeModel& model, Engine& rng, const Bounds& bounds);

/// Q-matrix accumulator. Column j counts how often each variable was in S at
/// the j-th model-building step.
class StructureTrace {
public:
    StructureTrace() = default;
    explicit StructureTrace(std::size_t n) : q_(n) {}

    std::size_t dimension() const { return q_.size(); }
    std::size_t generations() const;
    std::size_t runs() const { return runs_; }

    const std::vector<std::size_t>& strong_counts() const { return strong_counts_; }
    std::uint32_t q(std::size_t variable, std::size_t column) const;

    void record(std::span<const std::size_t> strong, std::size_t column);

    /// Marks the end of one run's contribution.
    void finish_run() { ++runs_; }

    /// Elementwise addition of another trace's Q matrix (runs add, counts append).
    void merge(const StructureTrace& other);

private:
    std::vector<std::vector<std::uint32_t>> q_;
    std::vector<std::size_t> strong_counts_;
    std::size_t runs_ = 0;
};

void record_structure(const VariablePartition& partition, std::size_t column, StructureTrace& trace);

} // namespace edamcc
