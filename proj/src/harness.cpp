#include "edamcc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace edamcc::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Collapses whitespace around '=' and ',' so that pairs become single tokens.
std::vector<std::string> tokenize(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    bool in_comment = false;
    for (char ch : text) {
        if (ch == '\n')
            in_comment = false;
        else if (ch == '#')
            in_comment = true;
        if (in_comment)
            continue;
        cleaned.push_back(ch == '\t' || ch == '\r' ? ' ' : ch);
    }

    std::string glued;
    for (std::size_t i = 0; i < cleaned.size(); ++i) {
        const char ch = cleaned[i];
        if (ch == '=' || ch == ',') {
            while (!glued.empty() && glued.back() == ' ')
                glued.pop_back();
            glued.push_back(ch);
            while (i + 1 < cleaned.size() && cleaned[i + 1] == ' ')
                ++i;
        } else {
            glued.push_back(ch);
        }
    }

    std::vector<std::string> tokens;
    std::istringstream in(glued);
    std::string tok;
    while (in >> tok)
        tokens.push_back(tok);
    return tokens;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (errno == ERANGE)
        throw ConfigError(key, "integer out of range: '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

// Integers written in scientific form (5e5) are accepted for budgets.
std::uint64_t parse_count(const std::string& key, const std::string& value) {
    if (value.find_first_of("eE.") == std::string::npos)
        return parse_uint(key, value);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !(v >= 0.0) || v != std::floor(v) || v > 1e18)
        throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

double parse_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end == value.c_str() || *end != '\0' || !std::isfinite(v))
        throw ConfigError(key, "expected a real number, got '" + value + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(value);
    while (std::getline(in, part, ','))
        parts.push_back(trim(part));
    return parts;
}

std::string format_sci(double v, int digits = 10) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

std::string format_general(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(trim(field));
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << text;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for " + path.string());
    }
    fs::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("cannot finalize " + path.string() + ": " + ec.message());
}

ProblemInstanceSpec ExperimentConfig::instance_spec() const {
    return ProblemInstanceSpec{problem, n, instance_seed, transform_dir, bias};
}

MccConfig ExperimentConfig::mcc_config() const {
    MccConfig cfg;
    cfg.theta = theta;
    cfg.c = std::min(c, n);
    cfg.m_corr = m_corr;
    cfg.base_model = base_model;
    return cfg;
}

void ExperimentConfig::validate() const {
    if (n < 2)
        throw ConfigError("n", "must be at least 2");
    if (population_sizes.empty())
        throw ConfigError("population_sizes", "at least one population size is required");
    for (std::size_t m : population_sizes) {
        if (!(tau > 0.0 && tau <= 1.0))
            break;
        if (static_cast<std::size_t>(std::floor(tau * static_cast<double>(m))) < 2)
            throw ConfigError("population_sizes", "floor(tau*M) must be at least 2 for M=" + std::to_string(m));
    }
    if (!(tau > 0.0 && tau <= 1.0))
        throw ConfigError("tau", "must lie in (0,1]");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ConfigError("theta", "must lie in [0,1]");
    if (c < 1)
        throw ConfigError("c", "must be at least 1");
    if (algorithm == Algorithm::eda_mcc_gc && c < 2)
        throw ConfigError("c", "greedy clustering requires c >= 2");
    if (m_corr < 2)
        throw ConfigError("m_corr", "must be at least 2");
    if (runs < 1)
        throw ConfigError("runs", "must be at least 1");
    const std::size_t largest = *std::max_element(population_sizes.begin(), population_sizes.end());
    if (budget_fes < largest)
        throw ConfigError("budget_fes", "must cover at least one population (" + std::to_string(largest) + ")");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    bool have_problem = false, have_algorithm = false, have_n = false, have_budget = false;

    for (const auto& token : tokenize(text)) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError(token, "expected key = value");
        std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (value.empty())
            throw ConfigError(key, "missing value");

        // Aliases.
        if (key == "root_seed")
            key = "seed";
        else if (key == "M" || key == "pop_sizes")
            key = "population_sizes";
        else if (key == "max_fes")
            key = "budget_fes";
        else if (key == "out")
            key = "output_dir";

        if (!seen.insert(key).second)
            throw ConfigError(key, "duplicate key");

        try {
            if (key == "problem") {
                cfg.problem = parse_function_id(value);
                have_problem = true;
            } else if (key == "n") {
                cfg.n = parse_uint(key, value);
                have_n = true;
            } else if (key == "algorithm") {
                cfg.algorithm = parse_algorithm(value);
                have_algorithm = true;
            } else if (key == "population_sizes") {
                cfg.population_sizes.clear();
                for (const auto& part : split_list(value))
                    cfg.population_sizes.push_back(parse_uint(key, part));
            } else if (key == "tau") {
                cfg.tau = parse_real(key, value);
            } else if (key == "theta") {
                cfg.theta = parse_real(key, value);
            } else if (key == "c") {
                cfg.c = parse_uint(key, value);
            } else if (key == "m_corr") {
                cfg.m_corr = parse_uint(key, value);
            } else if (key == "base_model") {
                cfg.base_model = parse_base_model(value);
            } else if (key == "budget_fes") {
                cfg.budget_fes = parse_count(key, value);
                have_budget = true;
            } else if (key == "runs") {
                cfg.runs = parse_uint(key, value);
            } else if (key == "seed") {
                cfg.root_seed = parse_uint(key, value);
            } else if (key == "instance_seed") {
                cfg.instance_seed = parse_uint(key, value);
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else if (key == "transform_dir") {
                cfg.transform_dir = fs::path(value);
            } else if (key == "bias") {
                cfg.bias = parse_real(key, value);
            } else {
                throw ConfigError(key, "unknown key");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
    }

    if (!have_problem)
        throw ConfigError("problem", "missing mandatory key");
    if (!have_algorithm)
        throw ConfigError("algorithm", "missing mandatory key");
    if (!have_n)
        throw ConfigError("n", "missing mandatory key");
    if (!have_budget)
        cfg.budget_fes = 10000ULL * cfg.n;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError("config", e.what());
    }
    return parse_config(text);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["problem"] = to_string(c.problem);
    j["n"] = c.n;
    j["instance_seed"] = c.instance_seed;
    j["transform_dir"] = c.transform_dir ? json(c.transform_dir->string()) : json(nullptr);
    j["bias"] = c.bias ? json(*c.bias) : json(nullptr);
    j["algorithm"] = to_string(c.algorithm);
    j["population_sizes"] = c.population_sizes;
    j["tau"] = c.tau;
    j["theta"] = c.theta;
    j["c"] = c.c;
    j["m_corr"] = c.m_corr;
    j["base_model"] = to_string(c.base_model);
    j["budget_fes"] = c.budget_fes;
    j["runs"] = c.runs;
    j["seed"] = c.root_seed;
    j["output_dir"] = c.output_dir.string();
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.problem = parse_function_id(j.at("problem").get<std::string>());
    c.n = j.at("n").get<std::size_t>();
    c.instance_seed = j.at("instance_seed").get<std::uint64_t>();
    if (!j.at("transform_dir").is_null())
        c.transform_dir = fs::path(j.at("transform_dir").get<std::string>());
    if (!j.at("bias").is_null())
        c.bias = j.at("bias").get<double>();
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    c.population_sizes = j.at("population_sizes").get<std::vector<std::size_t>>();
    c.tau = j.at("tau").get<double>();
    c.theta = j.at("theta").get<double>();
    c.c = j.at("c").get<std::size_t>();
    c.m_corr = j.at("m_corr").get<std::size_t>();
    c.base_model = parse_base_model(j.at("base_model").get<std::string>());
    c.budget_fes = j.at("budget_fes").get<std::uint64_t>();
    c.runs = j.at("runs").get<std::size_t>();
    c.root_seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = j.at("output_dir").get<std::string>();
    return c;
}

json to_json(const RunRecord& r) {
    json gens = json::array();
    for (const auto& g : r.trace.generations)
        gens.push_back(json::array({g.generation, g.fes, g.best_fitness, g.n_strong, g.strong_indices}));

    const auto& coords = r.trace.best.coordinates;
    json j;
    j["algorithm"] = r.algorithm;
    j["pop_size"] = r.pop_size;
    j["run_index"] = r.run_index;
    j["seed"] = r.seed;
    j["optimum_value"] = r.optimum_value;
    j["config"] = to_json(r.config);
    j["trace"] = {
        {"seed", r.trace.seed},
        {"generations", std::move(gens)},
        {"timings",
         {{"model_build", r.trace.timings.model_build},
          {"sampling", r.trace.timings.sampling},
          {"evaluation", r.trace.timings.evaluation}}},
        {"best",
         {{"coordinates", std::vector<double>(coords.data(), coords.data() + coords.size())},
          {"fitness", r.trace.best.fitness ? json(*r.trace.best.fitness) : json(nullptr)}}},
    };
    return j;
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.pop_size = j.at("pop_size").get<std::size_t>();
    r.run_index = j.at("run_index").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.optimum_value = j.at("optimum_value").get<double>();
    r.config = config_from_json(j.at("config"));

    const auto& t = j.at("trace");
    r.trace.seed = t.at("seed").get<std::uint64_t>();
    for (const auto& g : t.at("generations")) {
        GenerationRecord rec;
        rec.generation = g.at(0).get<std::size_t>();
        rec.fes = g.at(1).get<std::uint64_t>();
        rec.best_fitness = g.at(2).get<double>();
        rec.n_strong = g.at(3).get<std::size_t>();
        rec.strong_indices = g.at(4).get<std::vector<std::size_t>>();
        r.trace.generations.push_back(std::move(rec));
    }
    const auto& tm = t.at("timings");
    r.trace.timings = {tm.at("model_build").get<double>(), tm.at("sampling").get<double>(),
                       tm.at("evaluation").get<double>()};
    const auto coords = t.at("best").at("coordinates").get<std::vector<double>>();
    r.trace.best.coordinates = Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size()));
    if (!t.at("best").at("fitness").is_null())
        r.trace.best.fitness = t.at("best").at("fitness").get<double>();
    return r;
}

fs::path record_path(const fs::path& output_dir, const RunRecord& r) {
    return output_dir / "records" /
           (r.algorithm + "_M" + std::to_string(r.pop_size) + "_run" + std::to_string(r.run_index) + ".json");
}

void save_record(const RunRecord& record, const fs::path& output_dir) {
    write_file(record_path(output_dir, record), to_json(record).dump());
}

RunRecord load_record(const fs::path& path) {
    try {
        return record_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed record: " + e.what());
    }
}

std::vector<RunRecord> load_records(const fs::path& output_dir) {
    const fs::path dir = output_dir / "records";
    if (!fs::is_directory(dir))
        throw std::runtime_error("no records directory at " + dir.string());
    std::vector<RunRecord> records;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            records.push_back(load_record(entry.path()));
    }
    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.algorithm, a.pop_size, a.run_index) < std::tie(b.algorithm, b.pop_size, b.run_index);
    });
    return records;
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::size_t pop_size, std::size_t run_index) {
    return combine_seed(combine_seed(root_seed, pop_size), run_index);
}

RunRecord execute_single(const ExperimentConfig& config, const BenchmarkProblem& problem, std::size_t pop_size,
                         std::size_t run_index) {
    auto strategy = make_strategy(config.algorithm, config.mcc_config());
    RunOptions options;
    options.population_size = pop_size;
    options.tau = config.tau;
    options.max_fes = config.budget_fes;
    options.seed = derive_seed(config.root_seed, pop_size, run_index);

    const Objective objective = [&problem](const Eigen::VectorXd& x) { return evaluate(problem, x); };

    RunRecord record;
    record.config = config;
    record.algorithm = to_string(config.algorithm);
    record.pop_size = pop_size;
    record.run_index = run_index;
    record.seed = options.seed;
    record.optimum_value = problem.optimum_value();
    record.trace = run(objective, problem.bounds, *strategy, options);
    return record;
}

ExecutionResult execute(const ExperimentConfig& config, const ExecuteOptions& options) {
    config.validate();
    const BenchmarkProblem problem = instantiate(config.instance_spec());

    struct Task {
        std::size_t pop_size;
        std::size_t run_index;
    };
    std::vector<Task> tasks;
    for (std::size_t pop : config.population_sizes)
        for (std::size_t r = 0; r < config.runs; ++r)
            tasks.push_back({pop, r});

    if (options.persist)
        write_file(config.output_dir / "config.json", to_json(config).dump(2));

    std::vector<std::optional<RunRecord>> slots(tasks.size());
    std::vector<RunFailure> failures;
    std::mutex failure_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& task = tasks[i];
            try {
                RunRecord rec = execute_single(config, problem, task.pop_size, task.run_index);
                if (options.persist)
                    save_record(rec, config.output_dir);
                slots[i] = std::move(rec);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                failures.push_back({task.pop_size, task.run_index, e.what()});
            }
        }
    };

    const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, tasks.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < jobs; ++k)
            pool.emplace_back(worker);
    }

    ExecutionResult result;
    for (auto& slot : slots) {
        if (slot)
            result.records.push_back(std::move(*slot));
    }
    std::sort(failures.begin(), failures.end(), [](const RunFailure& a, const RunFailure& b) {
        return std::tie(a.pop_size, a.run_index) < std::tie(b.pop_size, b.run_index);
    });
    result.failures = std::move(failures);

    if (options.persist && !result.failures.empty()) {
        std::string text;
        for (const auto& f : result.failures)
            text += "M=" + std::to_string(f.pop_size) + " run=" + std::to_string(f.run_index) + ": " + f.message + "\n";
        write_file(config.output_dir / "failures.txt", text);
    }
    return result;
}

double zero_rule(double value) {
    return std::abs(value) < 1e-12 ? 0.0 : value;
}

const SummaryCell& SummaryReport::cell(const std::string& algorithm, std::size_t pop_size) const {
    for (const auto& c : cells) {
        if (c.algorithm == algorithm && c.pop_size == pop_size)
            return c;
    }
    throw std::out_of_range("report: no cell for " + algorithm + " M=" + std::to_string(pop_size));
}

const SummaryCell& SummaryReport::best_cell(const std::string& algorithm) const {
    return cell(algorithm, best_pop_size.at(algorithm));
}

const Comparison* SummaryReport::comparison_for(const std::string& algorithm) const {
    for (const auto& c : comparisons) {
        if (c.algorithm == algorithm)
            return &c;
    }
    return nullptr;
}

std::string format_cell_value(double value) {
    value = zero_rule(value);
    if (value == 0.0)
        return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", value);
    return buf;
}

std::string SummaryReport::format_table() const {
    std::set<std::size_t> pops;
    std::vector<std::string> algorithms;
    for (const auto& c : cells) {
        pops.insert(c.pop_size);
        if (std::find(algorithms.begin(), algorithms.end(), c.algorithm) == algorithms.end())
            algorithms.push_back(c.algorithm);
    }

    std::ostringstream out;
    out << "algorithm";
    for (std::size_t p : pops)
        out << " | M=" << p;
    out << " | best M | vs " << baseline << "\n";
    for (const auto& alg : algorithms) {
        out << alg;
        for (std::size_t p : pops) {
            out << " | ";
            bool found = false;
            for (const auto& c : cells) {
                if (c.algorithm == alg && c.pop_size == p) {
                    out << format_cell_value(c.final_error.mean) << " ± " << format_cell_value(c.final_error.sample_std);
                    found = true;
                }
            }
            if (!found)
                out << "-";
        }
        out << " | " << best_pop_size.at(alg) << " | ";
        if (const auto* cmp = comparison_for(alg)) {
            char p[32];
            std::snprintf(p, sizeof p, "p=%.3g", cmp->test.p_two_tailed);
            out << p << " " << cmp->marker;
        } else {
            out << "-";
        }
        out << "\n";
    }
    return out.str();
}

SummaryReport report(const std::vector<RunRecord>& records, const std::optional<std::string>& baseline) {
    if (records.empty())
        throw std::invalid_argument("report: no records");

    std::map<std::pair<std::string, std::size_t>, std::vector<const RunRecord*>> groups;
    for (const auto& r : records)
        groups[{r.algorithm, r.pop_size}].push_back(&r);

    SummaryReport rep;
    for (auto& [key, group] : groups) {
        std::sort(group.begin(), group.end(),
                  [](const RunRecord* a, const RunRecord* b) { return a->run_index < b->run_index; });
        SummaryCell cell;
        cell.algorithm = key.first;
        cell.pop_size = key.second;
        double cpu = 0.0;
        for (const auto* r : group) {
            cell.finals.push_back(zero_rule(r->final_error()));
            cpu += r->trace.timings.total();
        }
        cell.final_error = stats::summarize(cell.finals);
        cell.final_error.mean = zero_rule(cell.final_error.mean);
        cell.final_error.sample_std = zero_rule(cell.final_error.sample_std);
        cell.mean_cpu_seconds = cpu / static_cast<double>(group.size());
        rep.cells.push_back(std::move(cell));
    }

    for (const auto& c : rep.cells) {
        auto it = rep.best_pop_size.find(c.algorithm);
        if (it == rep.best_pop_size.end()) {
            rep.best_pop_size[c.algorithm] = c.pop_size;
            continue;
        }
        const auto& incumbent = rep.cell(c.algorithm, it->second);
        if (c.final_error.mean < incumbent.final_error.mean ||
            (c.final_error.mean == incumbent.final_error.mean && c.pop_size < incumbent.pop_size))
            it->second = c.pop_size;
    }

    if (baseline) {
        if (!rep.best_pop_size.contains(*baseline))
            throw std::invalid_argument("report: baseline '" + *baseline + "' has no records");
        rep.baseline = *baseline;
    } else if (rep.best_pop_size.contains("eda-mcc")) {
        rep.baseline = "eda-mcc";
    } else {
        rep.baseline = rep.best_pop_size.begin()->first;
    }

    const auto& base = rep.best_cell(rep.baseline);
    for (const auto& [alg, pop] : rep.best_pop_size) {
        if (alg == rep.baseline)
            continue;
        const auto& other = rep.cell(alg, pop);
        Comparison cmp;
        cmp.algorithm = alg;
        cmp.baseline = rep.baseline;
        cmp.test = stats::mann_whitney_u(other.finals, base.finals);
        cmp.marker = stats::significance_marker(cmp.test.p_two_tailed);
        cmp.marker_ascii = stats::significance_marker_ascii(cmp.test.p_two_tailed);
        rep.comparisons.push_back(std::move(cmp));
    }
    return rep;
}

fs::path trace_csv_path(const fs::path& dir, const RunRecord& r) {
    return dir / ("trace_" + r.algorithm + "_M" + std::to_string(r.pop_size) + "_run" + std::to_string(r.run_index) +
                  ".csv");
}

std::vector<GenerationRecord> load_trace_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || trim(line) != "generation,fes,best_fitness,n_strong")
        throw std::runtime_error(path.string() + ": unexpected trace header");
    std::vector<GenerationRecord> out;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4)
            throw std::runtime_error(path.string() + ": malformed trace row");
        GenerationRecord g;
        g.generation = std::stoull(f[0]);
        g.fes = std::stoull(f[1]);
        g.best_fitness = std::strtod(f[2].c_str(), nullptr);
        g.n_strong = std::stoull(f[3]);
        out.push_back(std::move(g));
    }
    return out;
}

StructureTrace structure_of(const std::vector<RunRecord>& records) {
    if (records.empty())
        return {};
    const std::size_t n = records.front().config.n;
    StructureTrace total(n);
    for (const auto& r : records) {
        if (r.config.n != n)
            throw std::invalid_argument("q_matrix: records have different problem dimensions");
        StructureTrace one(n);
        const auto& gens = r.trace.generations;
        for (std::size_t g = 1; g < gens.size(); ++g)
            one.record(gens[g].strong_indices, g - 1);
        one.finish_run();
        total.merge(one);
    }
    return total;
}

std::vector<StrongCurvePoint> average_strong_curve(const std::vector<RunRecord>& records) {
    std::vector<StrongCurvePoint> curve;
    std::vector<std::size_t> counts;
    for (const auto& r : records) {
        const auto& gens = r.trace.generations;
        for (std::size_t g = 1; g < gens.size(); ++g) {
            const std::size_t k = g - 1;
            if (k >= curve.size()) {
                curve.push_back({gens[g].generation, 0.0, 0.0});
                counts.push_back(0);
            }
            curve[k].fes += static_cast<double>(gens[g].fes);
            curve[k].mean_strong += static_cast<double>(gens[g].n_strong);
            ++counts[k];
        }
    }
    for (std::size_t k = 0; k < curve.size(); ++k) {
        curve[k].fes /= static_cast<double>(counts[k]);
        curve[k].mean_strong /= static_cast<double>(counts[k]);
    }
    return curve;
}

namespace {

std::string trace_csv(const RunRecord& r) {
    std::string out = "generation,fes,best_fitness,n_strong\n";
    for (const auto& g : r.trace.generations) {
        out += std::to_string(g.generation) + "," + std::to_string(g.fes) + "," + format_sci(g.best_fitness, 16) +
               "," + std::to_string(g.n_strong) + "\n";
    }
    return out;
}

std::string q_matrix_csv(const std::vector<RunRecord>& records) {
    const StructureTrace q = structure_of(records);
    std::string out;
    for (std::size_t i = 0; i < q.dimension(); ++i) {
        for (std::size_t j = 0; j < q.generations(); ++j) {
            if (j)
                out += ",";
            out += std::to_string(q.q(i, j));
        }
        out += "\n";
    }
    return out;
}

std::string timing_csv(const std::vector<RunRecord>& records) {
    std::string out = "algorithm,pop_size,run,phase,seconds\n";
    for (const auto& r : records) {
        const auto& t = r.trace.timings;
        const std::pair<const char*, double> phases[] = {
            {"model_build", t.model_build}, {"sampling", t.sampling}, {"evaluation", t.evaluation}, {"total", t.total()}};
        for (const auto& [phase, seconds] : phases) {
            out += r.algorithm + "," + std::to_string(r.pop_size) + "," + std::to_string(r.run_index) + "," + phase +
                   "," + format_sci(seconds, 6) + "\n";
        }
    }
    return out;
}

std::string summary_csv(const SummaryReport& rep) {
    std::string out = "algorithm,pop_size,runs,mean,std,min,max,best,marker,p_value,mean_cpu_seconds\n";
    for (const auto& c : rep.cells) {
        const bool best = rep.best_pop_size.at(c.algorithm) == c.pop_size;
        const Comparison* cmp = best ? rep.comparison_for(c.algorithm) : nullptr;
        out += c.algorithm + "," + std::to_string(c.pop_size) + "," + std::to_string(c.final_error.count) + "," +
               format_sci(c.final_error.mean) + "," + format_sci(c.final_error.sample_std) + "," +
               format_sci(c.final_error.min) + "," + format_sci(c.final_error.max) + "," + (best ? "1" : "0") + "," +
               (cmp ? cmp->marker_ascii : "") + "," + (cmp ? format_sci(cmp->test.p_two_tailed) : "") + "," +
               format_sci(c.mean_cpu_seconds, 6) + "\n";
    }
    return out;
}

} // namespace

void export_csv(const std::vector<RunRecord>& records, CsvKind kind, const fs::path& path) {
    switch (kind) {
    case CsvKind::trace:
        for (const auto& r : records)
            write_file(trace_csv_path(path, r), trace_csv(r));
        break;
    case CsvKind::q_matrix:
        write_file(path, q_matrix_csv(records));
        break;
    case CsvKind::timing:
        write_file(path, timing_csv(records));
        break;
    case CsvKind::summary:
        write_file(path, summary_csv(report(records)));
        break;
    }
}

void export_summary_json(const std::vector<RunRecord>& records, const fs::path& path) {
    const SummaryReport rep = report(records);
    json cells = json::array();
    for (const auto& c : rep.cells) {
        cells.push_back({{"algorithm", c.algorithm},
                         {"pop_size", c.pop_size},
                         {"runs", c.final_error.count},
                         {"mean", c.final_error.mean},
                         {"std", c.final_error.sample_std},
                         {"min", c.final_error.min},
                         {"max", c.final_error.max},
                         {"finals", c.finals},
                         {"mean_cpu_seconds", c.mean_cpu_seconds}});
    }
    json cmps = json::array();
    for (const auto& c : rep.comparisons) {
        cmps.push_back({{"algorithm", c.algorithm},
                        {"baseline", c.baseline},
                        {"u", c.test.u_statistic},
                        {"p_two_tailed", c.test.p_two_tailed},
                        {"method", c.test.method == stats::UTestMethod::exact ? "exact" : "normal"},
                        {"marker", c.marker_ascii}});
    }
    json j{{"baseline", rep.baseline}, {"best_pop_size", rep.best_pop_size}, {"cells", cells}, {"comparisons", cmps}};
    write_file(path, j.dump(2) + "\n");
}

SweepResult sweep(const ExperimentConfig& config, const std::vector<double>& theta_grid,
                  const std::vector<std::size_t>& c_grid, const ExecuteOptions& options) {
    if (!is_mcc_family(config.algorithm))
        throw ConfigError("algorithm", "sweep requires an eda-mcc variant");
    if (theta_grid.empty())
        throw ConfigError("theta", "empty grid");
    if (c_grid.empty())
        throw ConfigError("c", "empty grid");
    for (double t : theta_grid) {
        if (!(t >= 0.0 && t <= 1.0))
            throw ConfigError("theta", "grid value " + format_general(t) + " outside [0,1]");
    }
    const std::size_t min_c = config.algorithm == Algorithm::eda_mcc_gc ? 2 : 1;
    for (std::size_t c : c_grid) {
        if (c < min_c || c > config.n)
            throw ConfigError("c", "grid value " + std::to_string(c) + " outside [" + std::to_string(min_c) + ",n]");
    }
    config.validate();

    SweepResult result;
    result.pop_size = config.population_sizes.front();
    for (double t : theta_grid) {
        for (std::size_t c : c_grid) {
            ExperimentConfig cell_cfg = config;
            cell_cfg.theta = t;
            cell_cfg.c = c;
            cell_cfg.population_sizes = {result.pop_size};
            cell_cfg.output_dir = config.output_dir / ("theta_" + format_general(t) + "_c_" + std::to_string(c));
            const auto exec = execute(cell_cfg, options);
            if (exec.records.empty())
                throw std::runtime_error("sweep: every run failed for theta=" + format_general(t) +
                                         " c=" + std::to_string(c));
            const auto rep = report(exec.records);
            result.cells.push_back({t, c, rep.cells.front()});
        }
    }
    if (options.persist)
        save_sweep_csv(result, config.output_dir / "sweep.csv");
    return result;
}

void save_sweep_csv(const SweepResult& result, const fs::path& path) {
    std::string out = "theta,c,pop_size,runs,mean,std,min,max\n";
    for (const auto& cell : result.cells) {
        const auto& s = cell.summary.final_error;
        out += format_sci(cell.theta, 16) + "," + std::to_string(cell.c) + "," + std::to_string(result.pop_size) +
               "," + std::to_string(s.count) + "," + format_sci(s.mean, 16) + "," + format_sci(s.sample_std, 16) +
               "," + format_sci(s.min, 16) + "," + format_sci(s.max, 16) + "\n";
    }
    write_file(path, out);
}

SweepResult load_sweep_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || trim(line) != "theta,c,pop_size,runs,mean,std,min,max")
        throw std::runtime_error(path.string() + ": unexpected sweep header");
    SweepResult result;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8)
            throw std::runtime_error(path.string() + ": malformed sweep row");
        SweepCell cell;
        cell.theta = std::strtod(f[0].c_str(), nullptr);
        cell.c = std::stoull(f[1]);
        result.pop_size = std::stoull(f[2]);
        cell.summary.pop_size = result.pop_size;
        auto& s = cell.summary.final_error;
        s.count = std::stoull(f[3]);
        s.mean = std::strtod(f[4].c_str(), nullptr);
        s.sample_std = std::strtod(f[5].c_str(), nullptr);
        s.min = std::strtod(f[6].c_str(), nullptr);
        s.max = std::strtod(f[7].c_str(), nullptr);
        result.cells.push_back(std::move(cell));
    }
    return result;
}

} // namespace edamcc::harness
