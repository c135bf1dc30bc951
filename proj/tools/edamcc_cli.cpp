// Command-line front end for running, sweeping, comparing and characterizing EDA experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edamcc/benchmarks.hpp"
#include "edamcc/harness.hpp"

namespace fs = std::filesystem;
using namespace edamcc;
using namespace edamcc::harness;

namespace {

enum ExitCode : int { ok = 0, other_error = 1, config_error = 2, io_error = 3, run_failures = 4 };

struct CommonFlags {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--out", flags.out, "Output directory (overrides output_dir)");
    cmd->add_option("--seed", flags.seed, "Root seed (overrides seed)");
    cmd->add_option("--jobs", flags.jobs, "Number of runs executed concurrently")->check(CLI::PositiveNumber);
    cmd->add_option("--format", flags.format, "Summary format")->check(CLI::IsMember({"csv", "json"}));
}

ExperimentConfig load_with_overrides(const std::string& path, const CommonFlags& flags) {
    ExperimentConfig cfg = load_config(path);
    if (flags.out)
        cfg.output_dir = *flags.out;
    if (flags.seed)
        cfg.root_seed = *flags.seed;
    return cfg;
}

void report_failures(const std::vector<RunFailure>& failures) {
    for (const auto& f : failures)
        std::fprintf(stderr, "run failed: M=%zu run=%zu: %s\n", f.pop_size, f.run_index, f.message.c_str());
}

void write_summary(const std::vector<RunRecord>& records, const fs::path& dir, const std::string& format) {
    if (format == "json")
        export_summary_json(records, dir / "summary.json");
    else
        export_csv(records, CsvKind::summary, dir / "summary.csv");
}

int cmd_run(const std::string& config_path, const CommonFlags& flags) {
    const ExperimentConfig cfg = load_with_overrides(config_path, flags);
    const auto result = execute(cfg, {flags.jobs, true});
    report_failures(result.failures);
    if (result.records.empty()) {
        std::fprintf(stderr, "no run completed\n");
        return run_failures;
    }
    write_summary(result.records, cfg.output_dir, flags.format);
    export_csv(result.records, CsvKind::timing, cfg.output_dir / "timing.csv");
    export_csv(result.records, CsvKind::trace, cfg.output_dir / "traces");
    std::cout << report(result.records).format_table();
    std::cout << "records: " << result.records.size() << " written to " << cfg.output_dir.string() << "\n";
    return result.failures.empty() ? ok : run_failures;
}

std::vector<double> parse_theta_grid(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& s : items) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty())
            throw ConfigError("theta", "not a number: '" + s + "'");
        out.push_back(v);
    }
    return out;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& thetas,
              const std::vector<std::size_t>& cs, const CommonFlags& flags) {
    const ExperimentConfig cfg = load_with_overrides(config_path, flags);
    const SweepResult result = sweep(cfg, parse_theta_grid(thetas), cs, {flags.jobs, true});
    std::printf("theta,c,mean,std (M=%zu)\n", result.pop_size);
    for (const auto& cell : result.cells) {
        std::printf("%g,%zu,%s,%s\n", cell.theta, cell.c, format_cell_value(cell.summary.final_error.mean).c_str(),
                    format_cell_value(cell.summary.final_error.sample_std).c_str());
    }
    std::cout << "grid written to " << (cfg.output_dir / "sweep.csv").string() << "\n";
    return ok;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, const CommonFlags& flags) {
    const auto a = load_records(dir_a);
    const auto b = load_records(dir_b);
    if (a.empty() || b.empty())
        throw std::runtime_error("compare: both directories need at least one record");

    const auto rep_a = report(a);
    const auto rep_b = report(b);
    const std::string alg_a = a.front().algorithm;
    const std::string alg_b = b.front().algorithm;
    const auto& cell_a = rep_a.best_cell(alg_a);
    const auto& cell_b = rep_b.best_cell(alg_b);
    const auto test = stats::mann_whitney_u(cell_a.finals, cell_b.finals);

    std::string text;
    if (flags.format == "json") {
        nlohmann::json j{{"a", {{"dir", dir_a}, {"algorithm", alg_a}, {"pop_size", cell_a.pop_size},
                                {"mean", cell_a.final_error.mean}, {"std", cell_a.final_error.sample_std}}},
                         {"b", {{"dir", dir_b}, {"algorithm", alg_b}, {"pop_size", cell_b.pop_size},
                                {"mean", cell_b.final_error.mean}, {"std", cell_b.final_error.sample_std}}},
                         {"u", test.u_statistic},
                         {"p_two_tailed", test.p_two_tailed},
                         {"marker", stats::significance_marker_ascii(test.p_two_tailed)}};
        text = j.dump(2) + "\n";
    } else {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "side,algorithm,pop_size,mean,std\nA,%s,%zu,%.10e,%.10e\nB,%s,%zu,%.10e,%.10e\n"
                      "u,p_two_tailed,marker\n%.10e,%.10e,%s\n",
                      alg_a.c_str(), cell_a.pop_size, cell_a.final_error.mean, cell_a.final_error.sample_std,
                      alg_b.c_str(), cell_b.pop_size, cell_b.final_error.mean, cell_b.final_error.sample_std,
                      test.u_statistic, test.p_two_tailed, stats::significance_marker_ascii(test.p_two_tailed).c_str());
        text = buf;
    }
    if (flags.out) {
        const fs::path path = fs::path(*flags.out) / (flags.format == "json" ? "compare.json" : "compare.csv");
        write_file(path, text);
    }
    std::cout << text;
    return ok;
}

int cmd_characterize(const std::string& config_path, const CommonFlags& flags) {
    const ExperimentConfig cfg = load_with_overrides(config_path, flags);
    const auto result = execute(cfg, {flags.jobs, true});
    report_failures(result.failures);
    if (result.records.empty())
        return run_failures;

    for (std::size_t pop : cfg.population_sizes) {
        std::vector<RunRecord> subset;
        for (const auto& r : result.records) {
            if (r.pop_size == pop)
                subset.push_back(r);
        }
        if (subset.empty())
            continue;
        const std::string suffix = "_M" + std::to_string(pop) + ".csv";
        export_csv(subset, CsvKind::q_matrix, cfg.output_dir / ("q_matrix" + suffix));

        std::string curve = "generation,fes,mean_strong\n";
        for (const auto& p : average_strong_curve(subset)) {
            char line[96];
            std::snprintf(line, sizeof line, "%zu,%.10e,%.10e\n", p.generation, p.fes, p.mean_strong);
            curve += line;
        }
        write_file(cfg.output_dir / ("strong" + suffix), curve);
    }
    std::cout << "structure exported to " << cfg.output_dir.string() << "\n";
    return result.failures.empty() ? ok : run_failures;
}

int cmd_transforms(const std::string& problem, std::size_t n, std::uint64_t instance_seed, const std::string& out) {
    ProblemInstanceSpec spec;
    spec.id = parse_function_id(problem);
    spec.n = n;
    spec.seed = instance_seed;
    const BenchmarkProblem p = instantiate(spec);
    save_transforms(p, out);
    std::cout << "transforms for " << to_string(spec.id) << " n=" << n << " written to " << out << "\n";
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EDA-MCC experiment harness"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string config_path;

    auto* run_cmd = app.add_subcommand("run", "Execute a config and write records, summary, timings and traces");
    run_cmd->add_option("config", config_path, "Config file")->required();
    add_common(run_cmd, flags);

    std::vector<std::string> thetas;
    std::vector<std::size_t> cs;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a theta x c grid at the first population size");
    sweep_cmd->add_option("config", config_path, "Config file")->required();
    sweep_cmd->add_option("--theta", thetas, "Theta values")->required()->delimiter(',');
    sweep_cmd->add_option("--c", cs, "Subset sizes")->required()->delimiter(',');
    add_common(sweep_cmd, flags);

    std::string dir_a, dir_b;
    auto* compare_cmd = app.add_subcommand("compare", "Mann-Whitney U test between the best cells of two result dirs");
    compare_cmd->add_option("dir_a", dir_a, "First output directory")->required();
    compare_cmd->add_option("dir_b", dir_b, "Second output directory")->required();
    add_common(compare_cmd, flags);

    auto* char_cmd = app.add_subcommand("characterize", "Execute a config and export Q matrices and #strong curves");
    char_cmd->add_option("config", config_path, "Config file")->required();
    add_common(char_cmd, flags);

    std::string problem;
    std::size_t n = 0;
    std::uint64_t instance_seed = 1;
    std::string transform_out;
    auto* tf_cmd = app.add_subcommand("transforms", "Write the shift/rotation files of a generated instance");
    tf_cmd->add_option("--problem", problem, "Function id, e.g. F9")->required();
    tf_cmd->add_option("--n", n, "Dimension")->required();
    tf_cmd->add_option("--instance-seed", instance_seed, "Instance seed");
    tf_cmd->add_option("--out", transform_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*run_cmd)
            return cmd_run(config_path, flags);
        if (*sweep_cmd)
            return cmd_sweep(config_path, thetas, cs, flags);
        if (*compare_cmd)
            return cmd_compare(dir_a, dir_b, flags);
        if (*char_cmd)
            return cmd_characterize(config_path, flags);
        if (*tf_cmd)
            return cmd_transforms(problem, n, instance_seed, transform_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const TransformError& e) {
        std::fprintf(stderr, "transform error: %s\n", e.what());
        return io_error;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return io_error;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return config_error;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return io_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return other_error;
    }
    return other_error;
}
