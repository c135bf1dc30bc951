#include "edamcc/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>

namespace edamcc {

namespace {

constexpr std::array<FunctionInfo, 13> kFunctions{{
    {"Sphere", -100.0, 100.0, false, false, false},
    {"Shifted Sphere", -100.0, 100.0, true, false, false},
    {"Schwefel 2.21", -100.0, 100.0, false, false, false},
    {"Shifted Schwefel 2.21", -100.0, 100.0, true, false, false},
    {"Schwefel", -10.0, 10.0, false, false, false},
    {"Shifted Schwefel", -10.0, 10.0, true, false, true},
    {"Rosenbrock", -100.0, 100.0, false, false, false},
    {"Shifted Rosenbrock", -100.0, 100.0, true, false, true},
    {"Shifted Rotated High Conditioned Elliptic", -100.0, 100.0, true, true, false},
    {"Schwefel 2.6 with Global Optimum on Bounds", -100.0, 100.0, true, false, false},
    {"Rastrigin", -5.0, 5.0, false, false, false},
    {"Shifted Rotated Rastrigin", -5.0, 5.0, true, true, false},
    {"Shifted Expanded Griewank plus Rosenbrock", -3.0, 1.0, true, false, true},
}};

// Fixed-order dot product so that B = A o and A x at x = o agree bit for bit.
double row_dot(const Eigen::MatrixXd& a, Eigen::Index row, const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        s += a(row, j) * x[j];
    return s;
}

Eigen::VectorXd affine_product(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        out[i] = row_dot(a, i, x);
    return out;
}

double sphere(const Eigen::VectorXd& z) {
    return z.squaredNorm();
}

double max_abs(const Eigen::VectorXd& z) {
    return z.cwiseAbs().maxCoeff();
}

double schwefel(const Eigen::VectorXd& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double a = z[0] - z[i] * z[i];
        const double b = z[i] - 1.0;
        s += a * a + b * b;
    }
    return s;
}

double rosenbrock_pair(double a, double b) {
    const double t = a * a - b;
    return 100.0 * t * t + (a - 1.0) * (a - 1.0);
}

double rosenbrock(const Eigen::VectorXd& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < z.size(); ++i)
        s += rosenbrock_pair(z[i], z[i + 1]);
    return s;
}

double elliptic(const Eigen::VectorXd& z) {
    const double denom = static_cast<double>(z.size() - 1);
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        s += std::pow(1e6, static_cast<double>(i) / denom) * z[i] * z[i];
    return s;
}

double rastrigin(const Eigen::VectorXd& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        s += z[i] * z[i] - 10.0 * std::cos(2.0 * std::numbers::pi * z[i]) + 10.0;
    return s;
}

double griewank_1d(double y) {
    return y * y / 4000.0 - std::cos(y) + 1.0;
}

double expanded_griewank_rosenbrock(const Eigen::VectorXd& z) {
    const Eigen::Index n = z.size();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        s += griewank_1d(rosenbrock_pair(z[i], z[(i + 1) % n]));
    return s;
}

double frobenius_orthogonality_error(const Eigen::MatrixXd& m) {
    return (m * m.transpose() - Eigen::MatrixXd::Identity(m.rows(), m.cols())).norm();
}

Eigen::VectorXd interior_shift(std::size_t n, double lo, double hi, Engine& rng) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.4 * (hi - lo);
    std::uniform_real_distribution<double> dist(center - half, center + half);
    Eigen::VectorXd o(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < o.size(); ++i)
        o[i] = dist(rng);
    return o;
}

Eigen::MatrixXd well_conditioned_integer_matrix(std::size_t n, Engine& rng) {
    std::uniform_int_distribution<int> entry(-500, 500);
    const auto d = static_cast<Eigen::Index>(n);
    for (;;) {
        Eigen::MatrixXd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                a(i, j) = entry(rng);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
        if (pivots.minCoeff() > 1e-8 * pivots.maxCoeff())
            return a;
    }
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_rows(const std::filesystem::path& path, const Eigen::MatrixXd& rows) {
    std::ofstream out(path);
    if (!out)
        throw TransformError(TransformError::Kind::io, "cannot write transform file " + path.string());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j)
            out << (j ? " " : "") << format_value(rows(i, j));
        out << '\n';
    }
    if (!out)
        throw TransformError(TransformError::Kind::io, "write failed for " + path.string());
}

} // namespace

std::string to_string(FunctionId id) {
    return "F" + std::to_string(static_cast<int>(id));
}

FunctionId parse_function_id(const std::string& text) {
    if (text.size() >= 2 && (text[0] == 'F' || text[0] == 'f')) {
        char* end = nullptr;
        const long v = std::strtol(text.c_str() + 1, &end, 10);
        if (*end == '\0' && v >= 1 && v <= 13)
            return static_cast<FunctionId>(v);
    }
    throw std::invalid_argument("problem: expected F1..F13, got '" + text + "'");
}

const FunctionInfo& function_info(FunctionId id) {
    return kFunctions.at(static_cast<std::size_t>(id) - 1);
}

Eigen::VectorXd BenchmarkProblem::optimizer() const {
    const auto d = static_cast<Eigen::Index>(n);
    if (shift)
        return *shift;
    if (id == FunctionId::F5 || id == FunctionId::F7)
        return Eigen::VectorXd::Ones(d);
    return Eigen::VectorXd::Zero(d);
}

double BenchmarkProblem::operator()(const Eigen::VectorXd& x) const {
    return evaluate(*this, x);
}

double evaluate(const BenchmarkProblem& problem, const Eigen::VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(problem.n))
        throw std::invalid_argument("evaluate: expected " + std::to_string(problem.n) + " coordinates, got " +
                                    std::to_string(x.size()));

    if (problem.id == FunctionId::F10) {
        const auto& sys = problem.linear_system.value();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < sys.a.rows(); ++i)
            worst = std::max(worst, std::abs(row_dot(sys.a, i, x) - sys.b[i]));
        return worst + problem.bias;
    }

    Eigen::VectorXd z = x;
    if (problem.shift)
        z -= *problem.shift;
    if (function_info(problem.id).shift_plus_one)
        z.array() += 1.0;
    if (problem.rotation)
        z = problem.rotation->transpose() * z;

    double core = 0.0;
    switch (problem.id) {
    case FunctionId::F1:
    case FunctionId::F2:
        core = sphere(z);
        break;
    case FunctionId::F3:
    case FunctionId::F4:
        core = max_abs(z);
        break;
    case FunctionId::F5:
    case FunctionId::F6:
        core = schwefel(z);
        break;
    case FunctionId::F7:
    case FunctionId::F8:
        core = rosenbrock(z);
        break;
    case FunctionId::F9:
        core = elliptic(z);
        break;
    case FunctionId::F11:
    case FunctionId::F12:
        core = rastrigin(z);
        break;
    case FunctionId::F13:
        core = expanded_griewank_rosenbrock(z);
        break;
    case FunctionId::F10:
        break;
    }
    return core + problem.bias;
}

void validate(const BenchmarkProblem& p) {
    const auto d = static_cast<Eigen::Index>(p.n);
    if (p.n < 2)
        throw std::invalid_argument("problem: n must be at least 2");
    if (p.bounds.dimension() != p.n)
        throw std::invalid_argument("problem: bounds dimension mismatch");
    const auto& info = function_info(p.id);
    if (info.shifted != p.shift.has_value())
        throw std::invalid_argument("problem: shift presence does not match " + to_string(p.id));
    if (info.rotated != p.rotation.has_value())
        throw std::invalid_argument("problem: rotation presence does not match " + to_string(p.id));
    if (p.shift) {
        if (p.shift->size() != d)
            throw std::invalid_argument("problem: shift has wrong length");
        if (!p.bounds.contains(*p.shift))
            throw std::invalid_argument("problem: shift lies outside the bounds");
    }
    if (p.rotation) {
        if (p.rotation->rows() != d || p.rotation->cols() != d)
            throw std::invalid_argument("problem: rotation has wrong shape");
        if (frobenius_orthogonality_error(*p.rotation) > 1e-8)
            throw std::invalid_argument("problem: rotation is not orthogonal");
    }
    if (p.id == FunctionId::F10) {
        if (!p.linear_system || p.linear_system->a.rows() != d || p.linear_system->a.cols() != d ||
            p.linear_system->b.size() != d)
            throw std::invalid_argument("problem: F10 needs an n x n system");
        const Eigen::VectorXd ao = affine_product(p.linear_system->a, *p.shift);
        if ((ao - p.linear_system->b).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + ao.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("problem: F10 requires B = A o");
    }
}

Eigen::MatrixXd generate_rotation(std::size_t n, Engine& rng) {
    if (n < 1)
        throw std::invalid_argument("generate_rotation: n must be positive");
    const auto d = static_cast<Eigen::Index>(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            g(i, j) = normal(rng);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);
    }
    return q;
}

BenchmarkProblem instantiate(const ProblemInstanceSpec& spec, Engine& rng) {
    if (spec.n < 2)
        throw std::invalid_argument("n: must be at least 2");
    const auto& info = function_info(spec.id);
    BenchmarkProblem p;
    p.id = spec.id;
    p.n = spec.n;
    p.bounds = Bounds::box(spec.n, info.lower, info.upper);
    p.bias = spec.bias.value_or(0.0);

    if (spec.transform_dir) {
        const auto& dir = *spec.transform_dir;
        if (info.shifted)
            p.shift = load_vector(transform_path(dir, spec.id, spec.n, "shift"), spec.n);
        if (info.rotated)
            p.rotation = load_matrix(transform_path(dir, spec.id, spec.n, "rot"), spec.n, true);
        if (spec.id == FunctionId::F10) {
            p.linear_system = LinearSystem{load_matrix(transform_path(dir, spec.id, spec.n, "A"), spec.n, false),
                                           load_vector(transform_path(dir, spec.id, spec.n, "B"), spec.n)};
        }
        validate(p);
        return p;
    }

    if (spec.id == FunctionId::F10) {
        const auto d = static_cast<Eigen::Index>(spec.n);
        std::uniform_real_distribution<double> dist(info.lower, info.upper);
        Eigen::VectorXd o(d);
        for (Eigen::Index i = 0; i < d; ++i)
            o[i] = dist(rng);
        const auto quarter = static_cast<Eigen::Index>((spec.n + 3) / 4);
        o.head(quarter).setConstant(info.lower);
        o.tail(quarter).setConstant(info.upper);
        Eigen::MatrixXd a = well_conditioned_integer_matrix(spec.n, rng);
        Eigen::VectorXd b = affine_product(a, o);
        p.shift = std::move(o);
        p.linear_system = LinearSystem{std::move(a), std::move(b)};
    } else if (info.shifted) {
        p.shift = interior_shift(spec.n, info.lower, info.upper, rng);
    }
    if (info.rotated)
        p.rotation = generate_rotation(spec.n, rng);
    validate(p);
    return p;
}

BenchmarkProblem instantiate(const ProblemInstanceSpec& spec) {
    Engine rng = make_stream(spec.seed, static_cast<std::uint64_t>(spec.id) * 100003ULL + spec.n,
                             StreamPurpose::instance);
    return instantiate(spec, rng);
}

std::vector<double> load_transform_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw TransformError(TransformError::Kind::io, "cannot open transform file " + path.string());
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0' || !std::isfinite(v))
            throw TransformError(TransformError::Kind::parse, path.string() + ": cannot parse value #" +
                                                                  std::to_string(values.size() + 1) + " '" +
                                                                  token + "'");
        values.push_back(v);
    }
    return values;
}

Eigen::VectorXd load_vector(const std::filesystem::path& path, std::size_t n) {
    const auto values = load_transform_values(path);
    if (values.size() != n)
        throw TransformError(TransformError::Kind::size_mismatch, path.string() + ": expected " + std::to_string(n) +
                                                                      " values, found " +
                                                                      std::to_string(values.size()));
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(n));
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path, std::size_t n, bool orthogonal) {
    const auto values = load_transform_values(path);
    if (values.size() != n * n)
        throw TransformError(TransformError::Kind::size_mismatch, path.string() + ": expected " +
                                                                      std::to_string(n * n) + " values, found " +
                                                                      std::to_string(values.size()));
    const auto d = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), d, d);
    if (orthogonal) {
        const double err = frobenius_orthogonality_error(m);
        if (err > 1e-6)
            throw TransformError(TransformError::Kind::non_orthogonal,
                                 path.string() + ": rotation is not orthogonal (||MM^T - I||_F = " +
                                     format_value(err) + ")");
    }
    return m;
}

std::filesystem::path transform_path(const std::filesystem::path& dir, FunctionId id, std::size_t n,
                                     const std::string& kind) {
    return dir / (to_string(id) + "_" + std::to_string(n) + "D_" + kind + ".txt");
}

void save_transforms(const BenchmarkProblem& problem, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw TransformError(TransformError::Kind::io, "cannot create " + dir.string() + ": " + ec.message());
    if (problem.shift)
        write_rows(transform_path(dir, problem.id, problem.n, "shift"), problem.shift->transpose());
    if (problem.rotation)
        write_rows(transform_path(dir, problem.id, problem.n, "rot"), *problem.rotation);
    if (problem.linear_system) {
        write_rows(transform_path(dir, problem.id, problem.n, "A"), problem.linear_system->a);
        write_rows(transform_path(dir, problem.id, problem.n, "B"), problem.linear_system->b.transpose());
    }
}

} // namespace edamcc
