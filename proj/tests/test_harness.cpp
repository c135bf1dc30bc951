#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "edamcc/harness.hpp"
#include "test_util.hpp"

using namespace edamcc;
using namespace edamcc::harness;

namespace {

ExperimentConfig small_config(const std::filesystem::path& out, Algorithm alg = Algorithm::eda_mcc) {
    ExperimentConfig c;
    c.problem = FunctionId::F2;
    c.n = 6;
    c.algorithm = alg;
    c.population_sizes = {20};
    c.c = 3;
    c.m_corr = 10;
    c.budget_fes = 400;
    c.runs = 2;
    c.root_seed = 5;
    c.output_dir = out;
    return c;
}

std::string error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

// Drops the mean_cpu_seconds column.
std::string without_timing(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("minimal config gets the defaults") {
        const auto c = parse_config("problem=F1 n=50 algorithm=eda-mcc seed=1");
        CHECK(c.population_sizes == std::vector<std::size_t>{200, 500, 1000, 2000});
        CHECK(c.tau == 0.5);
        CHECK(c.theta == 0.3);
        CHECK(c.c == 20);
        CHECK(c.m_corr == 100);
        CHECK(c.budget_fes == 500000);
        CHECK(c.runs == 25);
        CHECK(c.root_seed == 1);
        CHECK(c.base_model == BaseModel::eeda);
    }

    SUBCASE("multi-line form with comments and lists") {
        const auto c = parse_config("# experiment\nproblem = F9\nn = 30   # dimension\nalgorithm = emna\n"
                                    "population_sizes = 100, 300\nbudget_fes = 5e4\nout = somewhere\n");
        CHECK(c.problem == FunctionId::F9);
        CHECK(c.population_sizes == std::vector<std::size_t>{100, 300});
        CHECK(c.budget_fes == 50000);
        CHECK(c.output_dir == "somewhere");
    }

    SUBCASE("errors name the key") {
        CHECK(error_key("problem=F1 n=50 algorithm=eda-mcc theta=1.5") == "theta");
        CHECK(error_key("problem=F1 n=50 algorithm=eda-mcc gamma=2") == "gamma");
        CHECK(error_key("n=50 algorithm=eda-mcc") == "problem");
        CHECK(error_key("problem=F1 n=50") == "algorithm");
        CHECK(error_key("problem=F1 n=50 algorithm=eda-mcc runs=many") == "runs");
        CHECK(error_key("problem=F1 n=50 algorithm=eda-mcc tau=0") == "tau");
        CHECK(error_key("problem=F99 n=50 algorithm=eda-mcc") == "problem");
        CHECK(error_key("problem=F1 n=50 algorithm=eda-mcc algorithm=umda") == "algorithm");
        CHECK(error_key("problem=F1 n=50 algorithm=eda-mcc M=200,x") == "population_sizes");
    }

    SUBCASE("json round trip") {
        auto c = parse_config("problem=F10 n=12 algorithm=eda-mcc-gc seed=3 bias=-2 theta=0.25 c=4");
        const auto back = config_from_json(to_json(c));
        CHECK(to_json(back) == to_json(c));
    }
}

TEST_CASE("execute and persist") {
    const testutil::TempDir dir;
    const auto cfg = small_config(dir.path());
    const auto result = execute(cfg);
    REQUIRE(result.failures.empty());
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].seed != result.records[1].seed);

    const auto loaded = load_records(dir.path());
    REQUIRE(loaded.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(loaded[i].trace.generations == result.records[i].trace.generations);
        CHECK(loaded[i].final_error() == result.records[i].final_error());
        CHECK(loaded[i].trace.best.coordinates == result.records[i].trace.best.coordinates);
    }

    SUBCASE("reloaded records reproduce the summary") {
        const auto a = report(result.records), b = report(loaded);
        CHECK(a.cells[0].final_error.mean == b.cells[0].final_error.mean);
        CHECK(a.cells[0].final_error.sample_std == b.cells[0].final_error.sample_std);
        CHECK(a.cells[0].finals == b.cells[0].finals);
    }

    SUBCASE("re-running with the same seed is deterministic") {
        const testutil::TempDir other;
        auto again = small_config(other.path());
        const auto r2 = execute(again, {2, true});
        REQUIRE(r2.records.size() == 2);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(r2.records[i].trace.best.fitness == result.records[i].trace.best.fitness);

        export_csv(result.records, CsvKind::summary, dir.path() / "s.csv");
        export_csv(r2.records, CsvKind::summary, other.path() / "s.csv");
        CHECK(without_timing(testutil::read_text(dir.path() / "s.csv")) ==
              without_timing(testutil::read_text(other.path() / "s.csv")));
    }

    SUBCASE("a partially written directory still loads") {
        std::filesystem::remove(record_path(dir.path(), result.records[1]));
        CHECK(load_records(dir.path()).size() == 1);
    }

    SUBCASE("record count covers every population size") {
        const testutil::TempDir other;
        auto grid = small_config(other.path(), Algorithm::umda);
        grid.population_sizes = {10, 20, 30};
        grid.runs = 3;
        grid.budget_fes = 200;
        CHECK(execute(grid).records.size() == 9);
    }
}

TEST_CASE("failed runs are recorded and the rest proceed") {
    const testutil::TempDir dir;
    const auto cfg = small_config(dir.path());
    // A directory squatting on run 0's record path makes that run's persistence fail.
    RunRecord probe;
    probe.algorithm = to_string(cfg.algorithm);
    probe.pop_size = 20;
    probe.run_index = 0;
    std::filesystem::create_directories(record_path(dir.path(), probe) / "blocker");

    const auto result = execute(cfg);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].run_index == 0);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].run_index == 1);
    CHECK(std::filesystem::exists(dir.path() / "failures.txt"));

    auto bad = cfg;
    bad.transform_dir = dir.path() / "missing";
    CHECK_THROWS_AS(execute(bad), TransformError);
}

TEST_CASE("report") {
    auto rec = [](const std::string& alg, std::size_t pop, std::size_t run, double best) {
        RunRecord r;
        r.algorithm = alg;
        r.pop_size = pop;
        r.run_index = run;
        r.trace.best.fitness = best;
        r.config.n = 2;
        return r;
    };

    SUBCASE("tiny values are reported as zero") {
        std::vector<RunRecord> rs{rec("a", 10, 0, 1e-15), rec("a", 10, 1, 1e-15)};
        const auto rep = report(rs);
        CHECK(rep.cells[0].final_error.mean == 0.0);
        CHECK(rep.cells[0].final_error.sample_std == 0.0);
        CHECK(format_cell_value(rep.cells[0].final_error.mean) == "0");
        CHECK(rep.format_table().find("0 ± 0") != std::string::npos);
    }

    SUBCASE("single record") {
        const auto rep = report({rec("a", 10, 0, 3.5)});
        CHECK(rep.cells[0].final_error.mean == 3.5);
        CHECK(rep.cells[0].final_error.sample_std == 0.0);
        CHECK(rep.comparisons.empty());
    }

    SUBCASE("best population size prefers the smaller on ties") {
        std::vector<RunRecord> rs{rec("a", 10, 0, 2.0), rec("a", 20, 0, 1.0), rec("a", 30, 0, 1.0)};
        CHECK(report(rs).best_pop_size.at("a") == 20);
    }

    SUBCASE("disjoint samples get the strongest marker") {
        std::vector<RunRecord> rs;
        for (std::size_t k = 0; k < 25; ++k) {
            rs.push_back(rec("eda-mcc", 10, k, 1.0 + static_cast<double>(k)));
            rs.push_back(rec("emna", 10, k, 100.0 + static_cast<double>(k)));
        }
        const auto rep = report(rs);
        CHECK(rep.baseline == "eda-mcc");
        REQUIRE(rep.comparison_for("emna"));
        CHECK(rep.comparison_for("emna")->marker == "§");
        CHECK(rep.comparison_for("emna")->marker_ascii == "***");
    }

    SUBCASE("zero rule holds in every exported cell") {
        std::vector<RunRecord> rs;
        for (std::size_t k = 0; k < 6; ++k)
            rs.push_back(rec("a", 10, k, std::pow(10.0, -10.0 - static_cast<double>(k))));
        const auto rep = report(rs);
        for (const auto& c : rep.cells) {
            for (double v : {c.final_error.mean, c.final_error.sample_std, c.final_error.min, c.final_error.max})
                CHECK((v == 0.0 || std::abs(v) >= 1e-12));
        }
    }

    CHECK_THROWS(report({}));
}

TEST_CASE("csv exports") {
    const testutil::TempDir dir;

    SUBCASE("Q matrix shape and bounds") {
        RunRecord r;
        r.algorithm = "x";
        r.config.n = 4;
        for (std::size_t g = 0; g < 4; ++g) {
            GenerationRecord gr;
            gr.generation = g;
            if (g > 0)
                gr.strong_indices = {g - 1};
            gr.n_strong = gr.strong_indices.size();
            r.trace.generations.push_back(gr);
        }
        export_csv({r}, CsvKind::q_matrix, dir.path() / "q.csv");
        const std::string text = testutil::read_text(dir.path() / "q.csv");
        CHECK(text == "1,0,0\n0,1,0\n0,0,1\n0,0,0\n");

        for (auto& g : r.trace.generations) {
            g.strong_indices.clear();
            g.n_strong = 0;
        }
        export_csv({r}, CsvKind::q_matrix, dir.path() / "q0.csv");
        CHECK(testutil::read_text(dir.path() / "q0.csv") == "0,0,0\n0,0,0\n0,0,0\n0,0,0\n");
    }

    SUBCASE("real runs") {
        auto cfg = small_config(dir.path());
        cfg.runs = 3;
        const auto recs = execute(cfg).records;

        export_csv(recs, CsvKind::trace, dir.path() / "traces");
        for (const auto& r : recs) {
            const auto back = load_trace_csv(trace_csv_path(dir.path() / "traces", r));
            REQUIRE(back.size() == r.trace.generations.size());
            for (std::size_t g = 0; g < back.size(); ++g) {
                CHECK(back[g].best_fitness == r.trace.generations[g].best_fitness);
                CHECK(back[g].fes == r.trace.generations[g].fes);
            }
        }

        const auto q = structure_of(recs);
        for (std::size_t i = 0; i < q.dimension(); ++i)
            for (std::size_t j = 0; j < q.generations(); ++j)
                CHECK(q.q(i, j) <= 3);
        CHECK(q.runs() == 3);

        export_csv(recs, CsvKind::timing, dir.path() / "t.csv");
        const auto timing = testutil::read_text(dir.path() / "t.csv");
        CHECK(timing.rfind("algorithm,pop_size,run,phase,seconds\n", 0) == 0);
        CHECK(timing.find(",model_build,") != std::string::npos);

        export_csv(recs, CsvKind::summary, dir.path() / "s.csv");
        CHECK(testutil::read_text(dir.path() / "s.csv").rfind("algorithm,pop_size,runs,mean,std", 0) == 0);
        export_summary_json(recs, dir.path() / "s.json");
        CHECK(std::filesystem::exists(dir.path() / "s.json"));

        const auto curve = average_strong_curve(recs);
        CHECK(curve.size() + 1 == recs[0].trace.generations.size());
    }

    SUBCASE("write failures name the path") {
        testutil::write_text(dir.path() / "file", "x");
        try {
            write_file(dir.path() / "file" / "child.csv", "data");
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("child.csv") != std::string::npos);
        }
    }
}

TEST_CASE("sweep") {
    const testutil::TempDir dir;
    auto cfg = small_config(dir.path());

    const auto res = sweep(cfg, {0.2, 0.4}, {2, 3});
    CHECK(res.cells.size() == 4);
    std::size_t runs = 0;
    for (const auto& c : res.cells)
        runs += c.summary.final_error.count;
    CHECK(runs == 8);

    const auto back = load_sweep_csv(dir.path() / "sweep.csv");
    REQUIRE(back.cells.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back.cells[i].summary.final_error.mean == res.cells[i].summary.final_error.mean);
        CHECK(back.cells[i].theta == res.cells[i].theta);
        CHECK(back.cells[i].c == res.cells[i].c);
    }

    SUBCASE("theta = 1 behaves like the univariate model") {
        const testutil::TempDir other;
        auto u = small_config(other.path(), Algorithm::umda);
        auto m = small_config(other.path() / "m");
        m.theta = 1.0;
        const auto ur = execute(u, {1, false}).records;
        const auto mr = execute(m, {1, false}).records;
        REQUIRE(ur.size() == mr.size());
        for (std::size_t i = 0; i < ur.size(); ++i) {
            for (const auto& g : mr[i].trace.generations)
                CHECK(g.n_strong == 0);
            // Same sampling stream and the same per-variable draws.
            CHECK(mr[i].trace.best.fitness == ur[i].trace.best.fitness);
        }
    }

    CHECK_THROWS_AS(sweep(cfg, {1.5}, {2}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, {0.3}, {0}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, {0.3}, {7}), ConfigError);
    CHECK_THROWS_AS(sweep(small_config(dir.path(), Algorithm::emna), {0.3}, {2}), ConfigError);
}
