#pragma once

/// @file harness.hpp
/// @brief Experiment orchestration: configs, multi-run execution, persistence,
/// summary reports and CSV export.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "edamcc/algorithms.hpp"
#include "edamcc/benchmarks.hpp"
#include "edamcc/core.hpp"
#include "edamcc/mcc.hpp"
#include "edamcc/stats.hpp"

namespace edamcc::harness {

/// Raised for malformed or out-of-range configuration; key() names the culprit.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ExperimentConfig {
    FunctionId problem = FunctionId::F1;
    std::size_t n = 0;
    std::uint64_t instance_seed = 1;
    std::optional<std::filesystem::path> transform_dir;
    std::optional<double> bias;

    Algorithm algorithm = Algorithm::eda_mcc;
    std::vector<std::size_t> population_sizes{200, 500, 1000, 2000};
    double tau = 0.5;
    double theta = 0.3;
    std::size_t c = 20;
    std::size_t m_corr = 100;
    BaseModel base_model = BaseModel::eeda;
    std::uint64_t budget_fes = 0; // 0 before defaults are applied; then 10000 * n
    std::size_t runs = 25;
    std::uint64_t root_seed = 0;
    std::filesystem::path output_dir = "results";

    ProblemInstanceSpec instance_spec() const;

    /// MCC parameters with c capped at n.
    MccConfig mcc_config() const;

    /// Range checks; throws ConfigError naming the key.
    void validate() const;
};

/// Flat `key = value` text, `#` starts a comment. Pairs may be separated by
/// newlines or whitespace. Lists are comma separated.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct RunRecord {
    ExperimentConfig config;
    std::string algorithm;
    std::size_t pop_size = 0;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    double optimum_value = 0.0;
    RunTrace trace;

    double final_error() const { return trace.final_best() - optimum_value; }
};

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);

std::filesystem::path record_path(const std::filesystem::path& output_dir, const RunRecord& record);
void save_record(const RunRecord& record, const std::filesystem::path& output_dir);
RunRecord load_record(const std::filesystem::path& path);

/// Every record under `<output_dir>/records`, ordered by (algorithm, pop size, run).
std::vector<RunRecord> load_records(const std::filesystem::path& output_dir);

std::uint64_t derive_seed(std::uint64_t root_seed, std::size_t pop_size, std::size_t run_index);

/// One run of `config` at population size `pop_size`. Deterministic in (config, pop_size, run_index).
RunRecord execute_single(const ExperimentConfig& config, const BenchmarkProblem& problem, std::size_t pop_size,
                         std::size_t run_index);

struct RunFailure {
    std::size_t pop_size = 0;
    std::size_t run_index = 0;
    std::string message;
};

struct ExecuteOptions {
    std::size_t jobs = 1;
    bool persist = true;
};

struct ExecutionResult {
    std::vector<RunRecord> records; // ordered by (pop size, run)
    std::vector<RunFailure> failures;
};

ExecutionResult execute(const ExperimentConfig& config, const ExecuteOptions& options = {});

/// Values below 1e-12 in magnitude are reported as zero.
double zero_rule(double value);

struct SummaryCell {
    std::string algorithm;
    std::size_t pop_size = 0;
    stats::SampleSummary final_error; // after zero_rule
    std::vector<double> finals;       // after zero_rule, in run order
    double mean_cpu_seconds = 0.0;
};

struct Comparison {
    std::string algorithm;
    std::string baseline;
    stats::UTestResult test;
    std::string marker;
    std::string marker_ascii;
};

struct SummaryReport {
    std::vector<SummaryCell> cells; // ordered by (algorithm, pop size)
    std::map<std::string, std::size_t> best_pop_size;
    std::string baseline;
    std::vector<Comparison> comparisons;

    const SummaryCell& cell(const std::string& algorithm, std::size_t pop_size) const;
    const SummaryCell& best_cell(const std::string& algorithm) const;
    const Comparison* comparison_for(const std::string& algorithm) const;

    /// Human-readable table in "mean ± std" form with significance markers.
    std::string format_table() const;
};

/// `baseline` defaults to eda-mcc when present, otherwise the first algorithm name.
SummaryReport report(const std::vector<RunRecord>& records, const std::optional<std::string>& baseline = {});

/// "0" for zero, otherwise one-decimal scientific notation.
std::string format_cell_value(double value);

enum class CsvKind { trace, q_matrix, timing, summary };

/// trace: `path` is a directory receiving one trace_<alg>_M<pop>_run<k>.csv per record.
/// q_matrix / timing / summary: `path` is the output file.
void export_csv(const std::vector<RunRecord>& records, CsvKind kind, const std::filesystem::path& path);

void export_summary_json(const std::vector<RunRecord>& records, const std::filesystem::path& path);

std::filesystem::path trace_csv_path(const std::filesystem::path& dir, const RunRecord& record);
std::vector<GenerationRecord> load_trace_csv(const std::filesystem::path& path);

/// Q matrix over all records (which must share n).
StructureTrace structure_of(const std::vector<RunRecord>& records);

/// Mean #strong per generation across records: (generation, fes, mean).
struct StrongCurvePoint {
    std::size_t generation;
    double fes;
    double mean_strong;
};
std::vector<StrongCurvePoint> average_strong_curve(const std::vector<RunRecord>& records);

struct SweepCell {
    double theta = 0.0;
    std::size_t c = 0;
    SummaryCell summary;
};

struct SweepResult {
    std::size_t pop_size = 0;
    std::vector<SweepCell> cells; // theta-major
};

/// Runs the full theta x c grid at the first configured population size, one
/// subdirectory per cell, and persists `<output_dir>/sweep.csv`.
SweepResult sweep(const ExperimentConfig& config, const std::vector<double>& theta_grid,
                  const std::vector<std::size_t>& c_grid, const ExecuteOptions& options = {});

void save_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult load_sweep_csv(const std::filesystem::path& path);

/// Writes `text` atomically (temporary file + rename); throws std::runtime_error with the path on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace edamcc::harness
