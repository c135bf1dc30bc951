#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "edamcc/benchmarks.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace edamcc;

namespace {

BenchmarkProblem make(FunctionId id, std::size_t n, std::uint64_t seed = 1, std::optional<double> bias = {}) {
    ProblemInstanceSpec spec;
    spec.id = id;
    spec.n = n;
    spec.seed = seed;
    spec.bias = bias;
    return instantiate(spec);
}

Eigen::VectorXd random_point(const BenchmarkProblem& p, std::mt19937_64& rng) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(p.n));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        std::uniform_real_distribution<double> d(p.bounds.lower[i], p.bounds.upper[i]);
        x[i] = d(rng);
    }
    return x;
}

const FunctionId kAll[] = {FunctionId::F1, FunctionId::F2,  FunctionId::F3,  FunctionId::F4, FunctionId::F5,
                           FunctionId::F6, FunctionId::F7,  FunctionId::F8,  FunctionId::F9, FunctionId::F10,
                           FunctionId::F11, FunctionId::F12, FunctionId::F13};

} // namespace

TEST_CASE("hand-evaluated points") {
    CHECK(evaluate(make(FunctionId::F1, 4), Eigen::VectorXd::Zero(4)) == 0.0);
    CHECK(evaluate(make(FunctionId::F7, 5), Eigen::VectorXd::Ones(5)) == 0.0);
    CHECK(evaluate(make(FunctionId::F7, 2), Eigen::VectorXd::Zero(2)) == 1.0);
    CHECK(evaluate(make(FunctionId::F3, 3), Eigen::Vector3d(3, -7, 2)) == 7.0);
    CHECK(evaluate(make(FunctionId::F11, 6), Eigen::VectorXd::Zero(6)) == 0.0);
    CHECK(evaluate(make(FunctionId::F5, 6), Eigen::VectorXd::Ones(6)) == 0.0);
    CHECK_THROWS_AS(evaluate(make(FunctionId::F1, 4), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("instance metadata") {
    const auto f1 = make(FunctionId::F1, 10);
    CHECK_FALSE(f1.shift);
    CHECK_FALSE(f1.rotation);
    CHECK(f1.optimum_value() == 0.0);
    CHECK(function_info(FunctionId::F11).lower == -5.0);
    CHECK(parse_function_id("F13") == FunctionId::F13);
    CHECK_THROWS(parse_function_id("F14"));

    const auto a = make(FunctionId::F12, 10, 3), b = make(FunctionId::F12, 10, 3);
    CHECK(*a.shift == *b.shift);
    CHECK(*a.rotation == *b.rotation);
    CHECK(*make(FunctionId::F12, 10, 4).shift != *a.shift);

    const auto f10 = make(FunctionId::F10, 9, 2);
    const auto& o = *f10.shift;
    for (int i = 0; i < 3; ++i) {
        CHECK(o[i] == -100.0);
        CHECK(o[8 - i] == 100.0);
    }
    for (Eigen::Index i = 0; i < 9; ++i)
        for (Eigen::Index j = 0; j < 9; ++j) {
            const double v = f10.linear_system->a(i, j);
            CHECK(v == std::round(v));
            CHECK(std::abs(v) <= 500.0);
        }

    SUBCASE("shifts sit in the central 80% of the box") {
        for (auto id : {FunctionId::F2, FunctionId::F6, FunctionId::F13}) {
            const auto p = make(id, 50, 7);
            const double lo = p.bounds.lower[0], hi = p.bounds.upper[0];
            CHECK(p.shift->minCoeff() >= lo + 0.1 * (hi - lo));
            CHECK(p.shift->maxCoeff() <= hi - 0.1 * (hi - lo));
        }
    }
}

TEST_CASE("every function is zero at its optimizer") {
    for (std::size_t n : {2, 10, 50}) {
        for (auto id : kAll) {
            for (double bias : {0.0, -450.0}) {
                const auto p = make(id, n, 11, bias);
                CAPTURE(to_string(id));
                CAPTURE(n);
                CHECK(std::abs(evaluate(p, p.optimizer()) - p.optimum_value()) <= 1e-9);
            }
        }
    }
    const auto f10 = make(FunctionId::F10, 20, 1, 3.5);
    CHECK(evaluate(f10, *f10.shift) == 3.5);
}

TEST_CASE("library and reference evaluators agree") {
    std::mt19937_64 rng(123);
    for (auto id : kAll) {
        for (std::size_t n : {2, 10, 30}) {
            const auto p = make(id, n, 5, 1.25);
            for (int k = 0; k < 100; ++k) {
                const Eigen::VectorXd x = random_point(p, rng);
                const double got = evaluate(p, x);
                const double want = oracle::benchmark(p, oracle::to_vec(x));
                CAPTURE(to_string(id));
                CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
                CHECK(got == evaluate(p, x));
            }
        }
    }
}

TEST_CASE("shifted functions are translated copies") {
    std::mt19937_64 rng(9);
    const std::pair<FunctionId, FunctionId> pairs[] = {
        {FunctionId::F1, FunctionId::F2}, {FunctionId::F3, FunctionId::F4}};
    for (auto [plain_id, shifted_id] : pairs) {
        const auto plain = make(plain_id, 8);
        const auto shifted = make(shifted_id, 8, 1, 2.0);
        for (int k = 0; k < 50; ++k) {
            Eigen::VectorXd x = random_point(plain, rng) * 0.1;
            CHECK(std::abs(evaluate(shifted, x + *shifted.shift) - (evaluate(plain, x) + 2.0)) <= 1e-9);
        }
    }
    // The +1 offset maps the unshifted optimizer (all ones) onto o.
    const std::pair<FunctionId, FunctionId> plus_one[] = {
        {FunctionId::F5, FunctionId::F6}, {FunctionId::F7, FunctionId::F8}};
    for (auto [plain_id, shifted_id] : plus_one) {
        const auto plain = make(plain_id, 8);
        const auto shifted = make(shifted_id, 8, 1, 2.0);
        for (int k = 0; k < 50; ++k) {
            Eigen::VectorXd x = random_point(plain, rng) * 0.1;
            const Eigen::VectorXd y = x + *shifted.shift - Eigen::VectorXd::Ones(8);
            const double want = evaluate(plain, x) + 2.0;
            CHECK(std::abs(evaluate(shifted, y) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("F9 with identity rotation is the plain elliptic sum") {
    auto p = make(FunctionId::F9, 6);
    p.rotation = Eigen::MatrixXd::Identity(6, 6);
    p.shift = Eigen::VectorXd::Zero(6);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -2, 3);
    double want = 0;
    for (int i = 0; i < 6; ++i)
        want += std::pow(1e6, i / 5.0) * x[i] * x[i];
    CHECK(evaluate(p, x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("F13 wraps the last pair around") {
    auto p = make(FunctionId::F13, 3);
    p.shift = Eigen::VectorXd::Zero(3);
    // z = x + 1
    const Eigen::Vector3d x(0.2, -0.4, 0.7);
    auto g = [](double a, double b) {
        const double r = 100 * std::pow(a * a - b, 2) + std::pow(a - 1, 2);
        return r * r / 4000 - std::cos(r) + 1;
    };
    const double want = g(1.2, 0.6) + g(0.6, 1.7) + g(1.7, 1.2);
    CHECK(evaluate(p, x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("rotations") {
    Engine rng(77);
    for (std::size_t n : {2, 5, 30}) {
        const Eigen::MatrixXd m = generate_rotation(n, rng);
        CHECK((m * m.transpose() - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-8);
        const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), -1, 2);
        CHECK(std::abs((m * v).norm() - v.norm()) <= 1e-10);
    }

    SUBCASE("2D angles are uniform") {
        constexpr int N = 10000, bins = 8;
        int counts[bins] = {};
        for (int k = 0; k < N; ++k) {
            const Eigen::MatrixXd m = generate_rotation(2, rng);
            double angle = std::atan2(m(1, 0), m(0, 0));
            if (angle < 0)
                angle += 2 * std::numbers::pi;
            ++counts[std::min(bins - 1, static_cast<int>(angle / (2 * std::numbers::pi) * bins))];
        }
        double chi2 = 0;
        for (int c : counts)
            chi2 += std::pow(c - N / double(bins), 2) / (N / double(bins));
        // 0.999 quantile of chi-square with 7 degrees of freedom.
        CHECK(chi2 < 24.322);
    }
}

TEST_CASE("transform files") {
    const testutil::TempDir dir;

    SUBCASE("round trip") {
        for (auto id : {FunctionId::F9, FunctionId::F10, FunctionId::F2}) {
            const auto p = make(id, 7, 3);
            save_transforms(p, dir.path());
            ProblemInstanceSpec spec;
            spec.id = id;
            spec.n = 7;
            spec.transform_dir = dir.path();
            const auto q = instantiate(spec);
            CHECK(*q.shift == *p.shift);
            if (p.rotation)
                CHECK(*q.rotation == *p.rotation);
            if (p.linear_system) {
                CHECK(q.linear_system->a == p.linear_system->a);
                CHECK(q.linear_system->b == p.linear_system->b);
            }
        }
    }

    SUBCASE("shift vector") {
        testutil::write_text(dir.path() / "s.txt", "1 2.5\n-3e1 4");
        CHECK(load_vector(dir.path() / "s.txt", 4) == Eigen::Vector4d(1, 2.5, -30, 4));
        try {
            load_vector(dir.path() / "s.txt", 5);
            FAIL("expected a size error");
        } catch (const TransformError& e) {
            CHECK(e.kind() == TransformError::Kind::size_mismatch);
        }
    }

    SUBCASE("non-orthogonal rotation") {
        testutil::write_text(dir.path() / "r.txt", "1 0\n0 1.5\n");
        try {
            load_matrix(dir.path() / "r.txt", 2, true);
            FAIL("expected an orthogonality error");
        } catch (const TransformError& e) {
            CHECK(e.kind() == TransformError::Kind::non_orthogonal);
        }
        CHECK_NOTHROW(load_matrix(dir.path() / "r.txt", 2, false));
    }

    SUBCASE("parse failure and missing file") {
        testutil::write_text(dir.path() / "bad.txt", "1 two 3");
        try {
            load_transform_values(dir.path() / "bad.txt");
            FAIL("expected a parse error");
        } catch (const TransformError& e) {
            CHECK(e.kind() == TransformError::Kind::parse);
        }
        try {
            load_transform_values(dir.path() / "absent.txt");
            FAIL("expected an io error");
        } catch (const TransformError& e) {
            CHECK(e.kind() == TransformError::Kind::io);
        }
    }
}
