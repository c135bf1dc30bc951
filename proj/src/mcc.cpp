#include "edamcc/mcc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace edamcc {

std::string to_string(BaseModel model) {
    return model == BaseModel::eeda ? "eeda" : "emna";
}

BaseModel parse_base_model(const std::string& text) {
    if (text == "eeda")
        return BaseModel::eeda;
    if (text == "emna")
        return BaseModel::emna;
    throw std::invalid_argument("base_model: expected 'eeda' or 'emna', got '" + text + "'");
}

void MccConfig::validate(std::size_t n) const {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("theta: must lie in [0,1]");
    if (c < 1 || c > n)
        throw std::invalid_argument("c: must lie in [1,n]");
    if (partition_mode == PartitionMode::greedy && c < 2)
        throw std::invalid_argument("c: greedy clustering requires c >= 2");
    if (m_corr < 2)
        throw std::invalid_argument("m_corr: must be at least 2");
}

std::vector<std::size_t> VariablePartition::strong_set() const {
    std::vector<std::size_t> out = leftover_weak;
    for (const auto& subset : strong_subsets)
        out.insert(out.end(), subset.begin(), subset.end());
    std::sort(out.begin(), out.end());
    return out;
}

void VariablePartition::validate(std::size_t n) const {
    std::vector<int> seen(n, 0);
    auto mark = [&](std::size_t i) {
        if (i >= n)
            throw std::logic_error("partition: index out of range");
        if (seen[i]++)
            throw std::logic_error("partition: variable " + std::to_string(i) + " assigned twice");
    };
    for (std::size_t i : weak)
        mark(i);
    for (const auto& subset : strong_subsets)
        for (std::size_t i : subset)
            mark(i);
    for (std::size_t i : leftover_weak)
        mark(i);
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i])
            throw std::logic_error("partition: variable " + std::to_string(i) + " not assigned");
    }
}

WeakStrongSplit identify_weak(const CorrelationMatrix& correlation, double theta) {
    const auto& c = correlation.entries;
    const Eigen::Index n = c.rows();
    WeakStrongSplit split;
    for (Eigen::Index i = 0; i < n; ++i) {
        bool weak = true;
        for (Eigen::Index j = 0; j < n && weak; ++j) {
            if (j != i && std::abs(c(i, j)) > theta)
                weak = false;
        }
        (weak ? split.weak : split.strong).push_back(static_cast<std::size_t>(i));
    }
    return split;
}

std::vector<std::vector<std::size_t>> partition_random(std::span<const std::size_t> strong, std::size_t c,
                                                       Engine& rng) {
    if (c < 1)
        throw std::invalid_argument("partition_random: c must be at least 1");
    std::vector<std::size_t> order(strong.begin(), strong.end());
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t begin = 0; begin < order.size(); begin += c) {
        const std::size_t end = std::min(order.size(), begin + c);
        std::vector<std::size_t> chunk(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                       order.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(chunk.begin(), chunk.end());
        subsets.push_back(std::move(chunk));
    }
    return subsets;
}

GreedyPartition partition_greedy(std::span<const std::size_t> strong, const CorrelationMatrix& correlation,
                                 double theta, std::size_t c) {
    if (c < 2)
        throw std::invalid_argument("partition_greedy: c must be at least 2");
    const auto& corr = correlation.entries;
    auto strength = [&](std::size_t a, std::size_t b) {
        return std::abs(corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    };

    std::vector<std::size_t> pool(strong.begin(), strong.end());
    std::sort(pool.begin(), pool.end());
    auto take = [&](std::size_t v) { pool.erase(std::find(pool.begin(), pool.end(), v)); };

    GreedyPartition out;
    while (pool.size() >= 2) {
        double best = theta;
        std::size_t first = 0, second = 0;
        bool found = false;
        for (std::size_t a = 0; a < pool.size(); ++a) {
            for (std::size_t b = a + 1; b < pool.size(); ++b) {
                const double s = strength(pool[a], pool[b]);
                if (s > best) {
                    best = s;
                    first = pool[a];
                    second = pool[b];
                    found = true;
                }
            }
        }
        if (!found)
            break;

        std::vector<std::size_t> cluster{first, second};
        take(first);
        take(second);

        while (cluster.size() < c && !pool.empty()) {
            double best_link = theta;
            std::size_t candidate = 0;
            bool grown = false;
            for (std::size_t x : pool) {
                double link = 0.0;
                for (std::size_t y : cluster)
                    link = std::max(link, strength(x, y));
                if (link > best_link) {
                    best_link = link;
                    candidate = x;
                    grown = true;
                }
            }
            if (!grown)
                break;
            cluster.push_back(candidate);
            take(candidate);
        }
        out.subsets.push_back(std::move(cluster));
    }
    out.leftover_weak = std::move(pool);
    return out;
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& data, const std::vector<std::size_t>& columns) {
    Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = data.col(static_cast<Eigen::Index>(columns[k]));
    return out;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& data, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), data.cols());
    for (std::size_t k = 0; k < rows.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = data.row(static_cast<Eigen::Index>(rows[k]));
    return out;
}

} // namespace

CompositeModel build_composite(const Eigen::MatrixXd& selected, const MccConfig& config, const StreamSet& streams) {
    const auto n = static_cast<std::size_t>(selected.cols());
    const auto m = static_cast<std::size_t>(selected.rows());
    if (m < 2)
        throw std::invalid_argument("build_composite: at least two selected rows are required");
    config.validate(n);

    const bool greedy = config.sm_enabled && config.partition_mode == PartitionMode::greedy;
    CorrelationMatrix correlation;
    if (config.wi_enabled || greedy) {
        Engine sub_rng = streams(StreamPurpose::subsample);
        const auto rows = subsample_indices(m, std::min(config.m_corr, m), sub_rng);
        correlation = correlation_from_data(gather_rows(selected, rows));
    }

    WeakStrongSplit split;
    if (config.wi_enabled) {
        split = identify_weak(correlation, config.theta);
    } else {
        split.strong.resize(n);
        std::iota(split.strong.begin(), split.strong.end(), std::size_t{0});
    }

    CompositeModel model;
    model.dimension = n;
    model.partition.weak = split.weak;
    if (!config.sm_enabled) {
        if (!split.strong.empty())
            model.partition.strong_subsets.push_back(split.strong);
    } else if (greedy) {
        auto clusters = partition_greedy(split.strong, correlation, config.theta, config.c);
        model.partition.strong_subsets = std::move(clusters.subsets);
        model.partition.leftover_weak = std::move(clusters.leftover_weak);
    } else {
        Engine part_rng = streams(StreamPurpose::partition);
        model.partition.strong_subsets = partition_random(split.strong, config.c, part_rng);
    }

    model.weak_indices = model.partition.weak;
    model.weak_indices.insert(model.weak_indices.end(), model.partition.leftover_weak.begin(),
                              model.partition.leftover_weak.end());
    std::sort(model.weak_indices.begin(), model.weak_indices.end());
    if (!model.weak_indices.empty())
        model.weak_model = fit_univariate(gather_columns(selected, model.weak_indices));

    model.subspaces.reserve(model.partition.strong_subsets.size());
    for (const auto& subset : model.partition.strong_subsets) {
        MultivariateGaussian g = fit_multivariate(gather_columns(selected, subset));
        if (config.base_model == BaseModel::eeda)
            g = eeda_scale(std::move(g));
        model.subspaces.push_back({subset, cholesky_factor(std::move(g))});
    }
    return model;
}

Eigen::VectorXd sample_composite(const CompositeModel& model, Engine& rng, const Bounds& bounds) {
    if (bounds.dimension() != model.dimension)
        throw std::invalid_argument("sample_composite: model and bounds dimensions differ");
    Eigen::VectorXd x(static_cast<Eigen::Index>(model.dimension));

    if (!model.weak_indices.empty()) {
        const Eigen::VectorXd w = draw_univariate(model.weak_model, rng);
        for (std::size_t k = 0; k < model.weak_indices.size(); ++k)
            x[static_cast<Eigen::Index>(model.weak_indices[k])] = w[static_cast<Eigen::Index>(k)];
    }
    for (const auto& sub : model.subspaces) {
        const Eigen::VectorXd s = draw_multivariate(sub.model, rng);
        for (std::size_t k = 0; k < sub.indices.size(); ++k)
            x[static_cast<Eigen::Index>(sub.indices[k])] = s[static_cast<Eigen::Index>(k)];
    }
    bounds.repair(x);
    return x;
}

std::size_t StructureTrace::generations() const {
    return q_.empty() ? 0 : q_.front().size();
}

std::uint32_t StructureTrace::q(std::size_t variable, std::size_t column) const {
    const auto& row = q_.at(variable);
    return column < row.size() ? row[column] : 0;
}

void StructureTrace::record(std::span<const std::size_t> strong, std::size_t column) {
    if (column >= generations()) {
        for (auto& row : q_)
            row.resize(column + 1, 0);
    }
    for (std::size_t i : strong) {
        if (i >= q_.size())
            throw std::out_of_range("structure trace: variable index out of range");
        ++q_[i][column];
    }
    strong_counts_.push_back(strong.size());
}

void StructureTrace::merge(const StructureTrace& other) {
    if (q_.empty()) {
        q_.resize(other.q_.size());
    } else if (other.dimension() != dimension() && other.dimension() != 0) {
        throw std::invalid_argument("structure trace: dimensions differ");
    }
    const std::size_t cols = std::max(generations(), other.generations());
    for (std::size_t i = 0; i < q_.size(); ++i) {
        q_[i].resize(cols, 0);
        if (i < other.q_.size()) {
            for (std::size_t j = 0; j < other.q_[i].size(); ++j)
                q_[i][j] += other.q_[i][j];
        }
    }
    strong_counts_.insert(strong_counts_.end(), other.strong_counts_.begin(), other.strong_counts_.end());
    runs_ += other.runs_;
}

void record_structure(const VariablePartition& partition, std::size_t column, StructureTrace& trace) {
    const auto strong = partition.strong_set();
    trace.record(strong, column);
}

} // namespace edamcc
