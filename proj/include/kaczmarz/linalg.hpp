#pragma once

//
// Minimal dense linear algebra: row-major matrices with cached row norms,
// Gram matrices, a cyclic Jacobi eigensolver and least-norm solutions.
//

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kaczmarz {

using Vector = std::vector<double>;

/// Row-major dense matrix. Immutable after construction so the cached
/// squared row norms and squared Frobenius norm never go stale.
class DenseMatrix
{
public:
    DenseMatrix() = default;

    /// Throws InvalidInput if rows*cols != entries.size(), a dimension is
    /// zero, or an entry is non-finite.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept
    {
        return {entries_.data() + i * cols_, cols_};
    }

    std::span<const double> entries() const noexcept { return entries_; }

    double row_norm_sq(std::size_t i) const noexcept { return row_norms_sq_[i]; }
    std::span<const double> row_norms_sq() const noexcept { return row_norms_sq_; }
    double frobenius_sq() const noexcept { return frobenius_sq_; }

    DenseMatrix transpose() const;

    /// Rows listed in `indices`, in that order.
    DenseMatrix select_rows(std::span<const std::size_t> indices) const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
    std::vector<double> row_norms_sq_;
    double frobenius_sq_ = 0.0;
};

struct EigenResult
{
    Vector eigenvalues;        // ascending
    DenseMatrix eigenvectors;  // column j pairs with eigenvalues[j]
    int sweeps = 0;
};

struct LambdaMin
{
    double lambda_min = 0.0;
    double lambda_min_pos = 0.0;
};

// vector helpers
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm2_sq(std::span<const double> v);
double norm_inf(std::span<const double> v);
Vector subtract(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> v);

Vector matvec(const DenseMatrix& A, std::span<const double> x);

/// Aᵀy
Vector matvec_transposed(const DenseMatrix& A, std::span<const double> y);

double row_dot(const DenseMatrix& A, std::size_t i, std::span<const double> x);

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);

/// AᵀA, symmetric by construction.
DenseMatrix gram_matrix(const DenseMatrix& A);

/// AAᵀ, symmetric by construction.
DenseMatrix outer_gram_matrix(const DenseMatrix& A);

inline constexpr std::size_t kMaxEigenDimension = 2000;
inline constexpr int kMaxJacobiSweeps = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Stops once every off-diagonal magnitude is <= 1e-12 * ||G||_F; throws
/// ConvergenceFailure after kMaxJacobiSweeps sweeps and InvalidInput on
/// asymmetric or oversized input.
EigenResult jacobi_eigen_sym(const DenseMatrix& G);

/// Smallest eigenvalue of AᵀA (clamped to 0 when within 1e-10 * ||AᵀA||_F
/// of zero) and the smallest eigenvalue above that threshold.
LambdaMin lambda_min_variants(const DenseMatrix& A);

struct LeastNormResult
{
    Vector x;     ///< x0 - Aᵀ y
    Vector dual;  ///< y = (AAᵀ)† (A x0 - b)
};

/// Both halves of the least-norm correction, without the consistency check.
LeastNormResult least_norm_solve(const DenseMatrix& A, std::span<const double> b, std::span<const double> x0);

/// x* = x0 - Aᵀ (AAᵀ)† (A x0 - b), the point of {x : Ax = b} closest to x0.
/// Throws InconsistentSystem if ||Ax* - b||_inf > 1e-8 (1 + ||b||_inf).
Vector least_norm_solution(const DenseMatrix& A, std::span<const double> b, std::span<const double> x0);

}  // namespace kaczmarz
