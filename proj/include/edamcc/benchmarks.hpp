#pragma once

/// @file benchmarks.hpp
/// @brief The F1-F13 test suite with shift, rotation and linear-system transforms.
///
/// Shifted variants use z = x - o (or z = x - o + 1 for the Rosenbrock-type
/// functions), rotated variants use the row-vector convention z = (x - o) M,
/// i.e. z = M^T (x - o). F10 is max_i |A_i x - B_i| with B = A o.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edamcc/core.hpp"
#include "edamcc/rng.hpp"

namespace edamcc {

enum class FunctionId { F1 = 1, F2, F3, F4, F5, F6, F7, F8, F9, F10, F11, F12, F13 };

std::string to_string(FunctionId id);
FunctionId parse_function_id(const std::string& text);

/// Static description of a function family.
struct FunctionInfo {
    const char* name;
    double lower;
    double upper;
    bool shifted;
    bool rotated;
    bool shift_plus_one; // z = x - o + 1
};

const FunctionInfo& function_info(FunctionId id);

struct LinearSystem {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
};

struct BenchmarkProblem {
    FunctionId id = FunctionId::F1;
    std::size_t n = 0;
    Bounds bounds;
    std::optional<Eigen::VectorXd> shift;
    std::optional<Eigen::MatrixXd> rotation;
    double bias = 0.0;
    std::optional<LinearSystem> linear_system;

    double optimum_value() const { return bias; }

    /// The known global minimizer: o for shifted functions, the all-ones
    /// vector for F5/F7, the origin otherwise.
    Eigen::VectorXd optimizer() const;

    double operator()(const Eigen::VectorXd& x) const;
};

/// Throws std::invalid_argument on a dimension mismatch.
double evaluate(const BenchmarkProblem& problem, const Eigen::VectorXd& x);

/// Checks the structural invariants (sizes, orthogonality, shift inside bounds, B = A o).
void validate(const BenchmarkProblem& problem);

struct ProblemInstanceSpec {
    FunctionId id = FunctionId::F1;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> transform_dir;
    std::optional<double> bias;
};

BenchmarkProblem instantiate(const ProblemInstanceSpec& spec, Engine& rng);

/// Convenience overload drawing transforms from the instance substream of spec.seed.
BenchmarkProblem instantiate(const ProblemInstanceSpec& spec);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign correction).
Eigen::MatrixXd generate_rotation(std::size_t n, Engine& rng);

class TransformError : public std::runtime_error {
public:
    enum class Kind { io, parse, size_mismatch, non_orthogonal };

    TransformError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Whitespace separated decimals, as read from disk.
std::vector<double> load_transform_values(const std::filesystem::path& path);

Eigen::VectorXd load_vector(const std::filesystem::path& path, std::size_t n);

/// Row-major n x n matrix. With `orthogonal`, rejects ||M M^T - I||_F > 1e-6.
Eigen::MatrixXd load_matrix(const std::filesystem::path& path, std::size_t n, bool orthogonal);

/// Path `<dir>/<F#>_<n>D_<kind>.txt` for kind in {shift, rot, A, B}.
std::filesystem::path transform_path(const std::filesystem::path& dir, FunctionId id, std::size_t n,
                                     const std::string& kind);

/// Writes every transform of `problem` under `dir` using transform_path names.
void save_transforms(const BenchmarkProblem& problem, const std::filesystem::path& dir);

} // namespace edamcc
