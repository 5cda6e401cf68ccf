#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

/// LS: Ax = b (consistent). LF: Ax <= b (feasible).
enum class ProblemKind { LS, LF };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

/// A validated problem instance. Construction enforces: no zero rows,
/// b.size() == A.rows(), planted witness (if any) consistent / feasible,
/// and unit rows when `normalized` is set.
class Problem
{
public:
    Problem(DenseMatrix A, Vector b, ProblemKind kind, std::optional<Vector> planted = std::nullopt,
            bool normalized = false);

    const DenseMatrix& A() const noexcept { return A_; }
    const Vector& b() const noexcept { return b_; }
    ProblemKind kind() const noexcept { return kind_; }
    const std::optional<Vector>& planted() const noexcept { return planted_; }
    bool normalized() const noexcept { return normalized_; }

    std::size_t rows() const noexcept { return A_.rows(); }
    std::size_t cols() const noexcept { return A_.cols(); }

    bool operator==(const Problem&) const = default;

private:
    DenseMatrix A_;
    Vector b_;
    ProblemKind kind_;
    std::optional<Vector> planted_;
    bool normalized_;
};

/// Gaussian A and planted x, b = A x. Deterministic in (m, n, seed).
Problem generate_consistent_ls(std::size_t m, std::size_t n, std::uint64_t seed);

/// Gaussian A and planted x, b_i = a_iᵀx + s_i with s_i = 0 on a
/// ceil(active_fraction * m) subset of rows and |N(0,1)| elsewhere.
Problem generate_feasible_lf(std::size_t m, std::size_t n, std::uint64_t seed, double active_fraction);

/// Number of rows designated active by generate_feasible_lf.
std::size_t active_row_count(std::size_t m, double active_fraction);

/// Scale each row of A and entry of b by 1/||a_i||. The planted witness is kept.
Problem normalize_rows(const Problem& p);

/// Text serialisation:
///   kaczmarz-problem v1 <ls|lf> <m> <n>
///   m lines of n entries followed by b_i
///   [planted x_1 ... x_n]
/// Numbers are written with 17 significant digits.
std::string format_problem(const Problem& p);
Problem parse_problem(std::string_view text);

void save_problem(const Problem& p, const std::filesystem::path& path);
Problem load_problem(const std::filesystem::path& path);

/// Write to a sibling temp file then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// %.17g
std::string format_number(double value);

}  // namespace kaczmarz
