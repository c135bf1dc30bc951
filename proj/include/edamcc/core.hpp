#pragma once

/// @file core.hpp
/// @brief Population lifecycle and the generational loop shared by every EDA.
///
/// The loop is: uniform init, evaluate, then repeat {truncation selection,
/// model build, sample M-1 offspring, evaluate, keep the single best parent}
/// until the evaluation budget is used up at a generation boundary.
/// Fitness is always minimized.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edamcc/rng.hpp"

namespace edamcc {

/// Box constraints, one closed interval per dimension.
struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Bounds box(std::size_t n, double lo, double hi);

    std::size_t dimension() const { return static_cast<std::size_t>(lower.size()); }

    /// Throws std::invalid_argument unless every interval has lower < upper.
    void validate() const;

    bool contains(const Eigen::VectorXd& x) const;

    /// Clips `x` into the box in place.
    void repair(Eigen::VectorXd& x) const;
};

struct Individual {
    Eigen::VectorXd coordinates;
    std::optional<double> fitness; // empty until evaluated

    bool evaluated() const { return fitness.has_value(); }
};

struct Population {
    std::vector<Individual> members;
    std::size_t generation_index = 0;

    std::size_t size() const { return members.size(); }

    /// Index of the member with the smallest fitness; earliest index on ties.
    std::size_t best_index() const;
};

struct SelectionConfig {
    double tau = 0.5;
    std::size_t m = 0;

    /// m = floor(tau * M); rejects tau outside (0,1] and m < 2.
    static SelectionConfig from_tau(double tau, std::size_t population_size);
};

class EvaluationBudget {
public:
    explicit EvaluationBudget(std::uint64_t max_fes);

    std::uint64_t max_fes() const { return max_fes_; }
    std::uint64_t used_fes() const { return used_fes_; }
    bool exhausted() const { return used_fes_ >= max_fes_; }

    void consume() { ++used_fes_; }

private:
    std::uint64_t max_fes_;
    std::uint64_t used_fes_ = 0;
};

struct GenerationRecord {
    std::size_t generation = 0;
    std::uint64_t fes = 0;
    double best_fitness = 0.0;
    std::size_t n_strong = 0;
    std::vector<std::size_t> strong_indices;

    bool operator==(const GenerationRecord&) const = default;
};

/// Wall-clock seconds spent per phase over a whole run.
struct PhaseTimings {
    double model_build = 0.0;
    double sampling = 0.0;
    double evaluation = 0.0;

    double total() const { return model_build + sampling + evaluation; }
};

struct RunTrace {
    std::vector<GenerationRecord> generations;
    PhaseTimings timings;
    Individual best;
    std::uint64_t seed = 0;

    double final_best() const { return best.fitness.value_or(0.0); }
};

/// Thrown when a model cannot be built or sampled (for example an
/// unrecoverable covariance factorization).
class StrategyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model-build / sample pair. build() is called once per generation with the
/// m selected rows; sample() is then called M-1 times.
class ModelStrategy {
public:
    virtual ~ModelStrategy() = default;

    virtual std::string name() const = 0;

    virtual void build(const Eigen::MatrixXd& selected, const StreamSet& streams) = 0;

    virtual Eigen::VectorXd sample(Engine& rng, const Bounds& bounds) const = 0;

    /// Variables the last built model treats as strongly dependent, ascending.
    virtual std::vector<std::size_t> strong_variables() const = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using GenerationHook = std::function<void(const GenerationRecord&)>;

struct RunOptions {
    std::size_t population_size = 200;
    double tau = 0.5;
    std::uint64_t max_fes = 0;
    std::uint64_t seed = 0;
};

Population uniform_init(const Bounds& bounds, std::size_t population_size, Engine& rng);

/// The m members with the smallest fitness, stable with respect to population order.
std::vector<Individual> truncation_select(const Population& population, std::size_t m);

/// Best member of `old` followed by the M-1 offspring.
Population elitist_replace(const Population& old, std::vector<Individual> offspring);

/// Indices (into a list of `available` items) of `count` distinct picks.
std::vector<std::size_t> subsample_indices(std::size_t available, std::size_t count, Engine& rng);

std::vector<Individual> subsample_without_replacement(std::span<const Individual> selected, std::size_t m_corr,
                                                      Engine& rng);

/// Stacks the coordinates of `individuals` as the rows of a matrix.
Eigen::MatrixXd to_matrix(std::span<const Individual> individuals);

RunTrace run(const Objective& objective, const Bounds& bounds, ModelStrategy& strategy, const RunOptions& options,
             const GenerationHook& on_generation = {});

} // namespace edamcc
