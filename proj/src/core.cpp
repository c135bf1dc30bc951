#include "edamcc/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace edamcc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

Bounds Bounds::box(std::size_t n, double lo, double hi) {
    Bounds b{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), lo),
             Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), hi)};
    b.validate();
    return b;
}

void Bounds::validate() const {
    if (lower.size() != upper.size())
        throw std::invalid_argument("bounds: lower and upper have different lengths");
    if (lower.size() == 0)
        throw std::invalid_argument("bounds: zero-dimensional box");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("bounds: interval " + std::to_string(i) + " has lower >= upper");
    }
}

bool Bounds::contains(const Eigen::VectorXd& x) const {
    if (x.size() != lower.size())
        return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower[i] && x[i] <= upper[i]))
            return false;
    }
    return true;
}

void Bounds::repair(Eigen::VectorXd& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], lower[i], upper[i]);
}

std::size_t Population::best_index() const {
    if (members.empty())
        throw std::invalid_argument("population is empty");
    std::size_t best = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!members[i].evaluated())
            throw std::invalid_argument("population contains an unevaluated member");
        if (*members[i].fitness < *members[best].fitness)
            best = i;
    }
    return best;
}

SelectionConfig SelectionConfig::from_tau(double tau, std::size_t population_size) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("selection: tau must lie in (0,1]");
    const auto m = static_cast<std::size_t>(std::floor(tau * static_cast<double>(population_size)));
    if (m < 2)
        throw std::invalid_argument("selection: floor(tau*M) must be at least 2");
    return SelectionConfig{tau, m};
}

EvaluationBudget::EvaluationBudget(std::uint64_t max_fes) : max_fes_(max_fes) {
    if (max_fes == 0)
        throw std::invalid_argument("budget: max_fes must be positive");
}

Population uniform_init(const Bounds& bounds, std::size_t population_size, Engine& rng) {
    bounds.validate();
    if (population_size < 2)
        throw std::invalid_argument("uniform_init: population size must be at least 2");

    const auto n = static_cast<Eigen::Index>(bounds.dimension());
    Population pop;
    pop.members.resize(population_size);
    for (auto& ind : pop.members) {
        ind.coordinates.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> dist(bounds.lower[i], bounds.upper[i]);
            ind.coordinates[i] = dist(rng);
        }
    }
    return pop;
}

std::vector<Individual> truncation_select(const Population& population, std::size_t m) {
    const std::size_t size = population.members.size();
    if (m < 2 || m > size)
        throw std::invalid_argument("truncation_select: need 2 <= m <= M");
    for (const auto& ind : population.members) {
        if (!ind.evaluated())
            throw std::invalid_argument("truncation_select: unevaluated member present");
    }

    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *population.members[a].fitness < *population.members[b].fitness;
    });

    std::vector<Individual> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k)
        out.push_back(population.members[order[k]]);
    return out;
}

Population elitist_replace(const Population& old, std::vector<Individual> offspring) {
    if (old.members.size() < 2 || offspring.size() + 1 != old.members.size())
        throw std::invalid_argument("elitist_replace: expected exactly M-1 offspring");
    for (const auto& ind : offspring) {
        if (!ind.evaluated())
            throw std::invalid_argument("elitist_replace: offspring must be evaluated");
    }

    Population next;
    next.generation_index = old.generation_index + 1;
    next.members.reserve(old.members.size());
    next.members.push_back(old.members[old.best_index()]);
    std::move(offspring.begin(), offspring.end(), std::back_inserter(next.members));
    return next;
}

std::vector<std::size_t> subsample_indices(std::size_t available, std::size_t count, Engine& rng) {
    if (count < 2 || count > available)
        throw std::invalid_argument("subsample: need 2 <= m_corr <= m");
    std::vector<std::size_t> idx(available);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `count` slots become a uniform draw.
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, available - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    return idx;
}

std::vector<Individual> subsample_without_replacement(std::span<const Individual> selected, std::size_t m_corr,
                                                      Engine& rng) {
    std::vector<Individual> out;
    out.reserve(m_corr);
    for (std::size_t i : subsample_indices(selected.size(), m_corr, rng))
        out.push_back(selected[i]);
    return out;
}

Eigen::MatrixXd to_matrix(std::span<const Individual> individuals) {
    if (individuals.empty())
        return {};
    const Eigen::Index n = individuals.front().coordinates.size();
    Eigen::MatrixXd data(static_cast<Eigen::Index>(individuals.size()), n);
    for (std::size_t r = 0; r < individuals.size(); ++r)
        data.row(static_cast<Eigen::Index>(r)) = individuals[r].coordinates.transpose();
    return data;
}

RunTrace run(const Objective& objective, const Bounds& bounds, ModelStrategy& strategy, const RunOptions& options,
             const GenerationHook& on_generation) {
    bounds.validate();
    const std::size_t pop_size = options.population_size;
    const auto selection = SelectionConfig::from_tau(options.tau, pop_size);
    if (options.max_fes < pop_size)
        throw std::invalid_argument("run: budget must cover the initial population");

    EvaluationBudget budget(options.max_fes);
    RunTrace trace;
    trace.seed = options.seed;

    auto evaluate = [&](Individual& ind) {
        if (ind.coordinates.size() != static_cast<Eigen::Index>(bounds.dimension()))
            throw StrategyError(strategy.name() + ": sampled individual has wrong dimension");
        ind.fitness = objective(ind.coordinates);
        budget.consume();
    };

    auto push_record = [&](const Population& pop, std::vector<std::size_t> strong) {
        GenerationRecord rec;
        rec.generation = pop.generation_index;
        rec.fes = budget.used_fes();
        rec.best_fitness = *pop.members[pop.best_index()].fitness;
        rec.n_strong = strong.size();
        rec.strong_indices = std::move(strong);
        if (on_generation)
            on_generation(rec);
        trace.generations.push_back(std::move(rec));
    };

    Engine init_rng = make_stream(options.seed, 0, StreamPurpose::init);
    Population pop = uniform_init(bounds, pop_size, init_rng);
    {
        const auto t0 = Clock::now();
        for (auto& ind : pop.members)
            evaluate(ind);
        trace.timings.evaluation += seconds_since(t0);
    }
    push_record(pop, {});

    while (!budget.exhausted()) {
        const StreamSet streams{options.seed, pop.generation_index + 1};
        const auto selected = truncation_select(pop, selection.m);

        auto t0 = Clock::now();
        try {
            strategy.build(to_matrix(selected), streams);
        } catch (const StrategyError&) {
            throw;
        } catch (const std::exception& e) {
            throw StrategyError(strategy.name() + ": model build failed at generation " +
                                std::to_string(streams.generation) + ": " + e.what());
        }
        trace.timings.model_build += seconds_since(t0);

        t0 = Clock::now();
        Engine sample_rng = streams(StreamPurpose::sampling);
        std::vector<Individual> offspring(pop_size - 1);
        for (auto& child : offspring)
            child.coordinates = strategy.sample(sample_rng, bounds);
        trace.timings.sampling += seconds_since(t0);

        t0 = Clock::now();
        for (auto& child : offspring)
            evaluate(child);
        trace.timings.evaluation += seconds_since(t0);

        pop = elitist_replace(pop, std::move(offspring));
        push_record(pop, strategy.strong_variables());
    }

    trace.best = pop.members[pop.best_index()];
    return trace;
}

} // namespace edamcc
