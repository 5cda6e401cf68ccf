#include "kaczmarz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries))
{
    if (rows_ == 0 || cols_ == 0)
        throw InvalidInput("matrix dimensions must be positive");
    if (entries_.size() != rows_ * cols_)
        throw InvalidInput("matrix has " + std::to_string(entries_.size()) + " entries, expected " +
                           std::to_string(rows_ * cols_));
    if (!all_finite(entries_))
        throw InvalidInput("matrix entries must be finite");

    row_norms_sq_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        row_norms_sq_[i] = norm2_sq(row(i));
    frobenius_sq_ = std::accumulate(row_norms_sq_.begin(), row_norms_sq_.end(), 0.0);
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> entries;
    entries.reserve(m * n);
    for (const auto& r : rows)
    {
        if (r.size() != n)
            throw InvalidInput("ragged row list");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return DenseMatrix(m, n, std::move(entries));
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        entries[i * n + i] = 1.0;
    return DenseMatrix(n, n, std::move(entries));
}

DenseMatrix DenseMatrix::transpose() const
{
    std::vector<double> t(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t[j * rows_ + i] = entries_[i * cols_ + j];
    return DenseMatrix(cols_, rows_, std::move(t));
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const
{
    std::vector<double> out;
    out.reserve(indices.size() * cols_);
    for (std::size_t i : indices)
    {
        if (i >= rows_)
            throw InvalidInput("row index " + std::to_string(i) + " out of range");
        auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return DenseMatrix(indices.size(), cols_, std::move(out));
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidInput("dot: length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += a[j] * b[j];
    return s;
}

double norm2_sq(std::span<const double> v)
{
    double s = 0.0;
    for (double e : v)
        s += e * e;
    return s;
}

double norm2(std::span<const double> v) { return std::sqrt(norm2_sq(v)); }

double norm_inf(std::span<const double> v)
{
    double s = 0.0;
    for (double e : v)
        s = std::max(s, std::abs(e));
    return s;
}

Vector subtract(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidInput("subtract: length mismatch");
    Vector out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        out[j] = a[j] - b[j];
    return out;
}

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

Vector matvec(const DenseMatrix& A, std::span<const double> x)
{
    if (x.size() != A.cols())
        throw InvalidInput("matvec: x has length " + std::to_string(x.size()) + ", expected " +
                           std::to_string(A.cols()));
    Vector y(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        y[i] = dot(A.row(i), x);
    return y;
}

Vector matvec_transposed(const DenseMatrix& A, std::span<const double> y)
{
    if (y.size() != A.rows())
        throw InvalidInput("matvec_transposed: length mismatch");
    Vector x(A.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        auto r = A.row(i);
        for (std::size_t j = 0; j < A.cols(); ++j)
            x[j] += y[i] * r[j];
    }
    return x;
}

double row_dot(const DenseMatrix& A, std::size_t i, std::span<const double> x)
{
    if (i >= A.rows())
        throw InvalidInput("row index " + std::to_string(i) + " out of range for " +
                           std::to_string(A.rows()) + " rows");
    if (x.size() != A.cols())
        throw InvalidInput("row_dot: length mismatch");
    return dot(A.row(i), x);
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B)
{
    if (A.cols() != B.rows())
        throw InvalidInput("matmul: inner dimension mismatch");
    std::vector<double> out(A.rows() * B.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k)
        {
            const double a = A(i, k);
            for (std::size_t j = 0; j < B.cols(); ++j)
                out[i * B.cols() + j] += a * B(k, j);
        }
    return DenseMatrix(A.rows(), B.cols(), std::move(out));
}

DenseMatrix gram_matrix(const DenseMatrix& A)
{
    const std::size_t n = A.cols();
    std::vector<double> g(n * n, 0.0);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p; q < n; ++q)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < A.rows(); ++i)
                s += A(i, p) * A(i, q);
            g[p * n + q] = s;
            g[q * n + p] = s;
        }
    return DenseMatrix(n, n, std::move(g));
}

DenseMatrix outer_gram_matrix(const DenseMatrix& A)
{
    const std::size_t m = A.rows();
    std::vector<double> g(m * m, 0.0);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p; q < m; ++q)
        {
            const double s = dot(A.row(p), A.row(q));
            g[p * m + q] = s;
            g[q * m + p] = s;
        }
    return DenseMatrix(m, m, std::move(g));
}

EigenResult jacobi_eigen_sym(const DenseMatrix& G)
{
    const std::size_t n = G.rows();
    if (G.cols() != n)
        throw InvalidInput("jacobi_eigen_sym: matrix is not square");
    if (n > kMaxEigenDimension)
        throw InvalidInput("jacobi_eigen_sym: dimension " + std::to_string(n) + " exceeds cap " +
                           std::to_string(kMaxEigenDimension));

    const double fro = std::sqrt(G.frobenius_sq());
    const double threshold = 1e-12 * fro;

    std::vector<double> a(G.entries().begin(), G.entries().end());
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
        {
            if (std::abs(a[p * n + q] - a[q * n + p]) > threshold)
                throw InvalidInput("jacobi_eigen_sym: matrix is not symmetric");
            const double mean = 0.5 * (a[p * n + q] + a[q * n + p]);
            a[p * n + q] = a[q * n + p] = mean;
        }

    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        v[i * n + i] = 1.0;

    auto max_off_diagonal = [&] {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off = std::max(off, std::abs(a[p * n + q]));
        return off;
    };

    int sweep = 0;
    for (; max_off_diagonal() > threshold; ++sweep)
    {
        if (sweep == kMaxJacobiSweeps)
            throw ConvergenceFailure("jacobi_eigen_sym: no convergence after " +
                                     std::to_string(kMaxJacobiSweeps) + " sweeps");

        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const double apq = a[p * n + q];
                if (apq == 0.0)
                    continue;

                // symmetric Schur 2x2: annihilate a(p,q)
                const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k)
                {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k)
                {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = a[q * n + p] = 0.0;

                for (std::size_t k = 0; k < n; ++k)
                {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return a[l * n + l] < a[r * n + r]; });

    EigenResult result;
    result.sweeps = sweep;
    result.eigenvalues.resize(n);
    std::vector<double> vs(n * n);
    for (std::size_t j = 0; j < n; ++j)
    {
        const std::size_t src = order[j];
        result.eigenvalues[j] = a[src * n + src];
        for (std::size_t k = 0; k < n; ++k)
            vs[k * n + j] = v[k * n + src];
    }
    result.eigenvectors = DenseMatrix(n, n, std::move(vs));
    return result;
}

LambdaMin lambda_min_variants(const DenseMatrix& A)
{
    const DenseMatrix G = gram_matrix(A);
    const EigenResult eig = jacobi_eigen_sym(G);
    const double threshold = 1e-10 * std::sqrt(G.frobenius_sq());

    LambdaMin out;
    out.lambda_min = std::abs(eig.eigenvalues.front()) <= threshold ? 0.0 : eig.eigenvalues.front();
    for (double lambda : eig.eigenvalues)
        if (lambda > threshold)
        {
            out.lambda_min_pos = lambda;
            break;
        }
    return out;
}

LeastNormResult least_norm_solve(const DenseMatrix& A, std::span<const double> b, std::span<const double> x0)
{
    if (b.size() != A.rows() || x0.size() != A.cols())
        throw InvalidInput("least_norm_solve: dimension mismatch");

    Vector r = matvec(A, x0);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] -= b[i];

    const DenseMatrix M = outer_gram_matrix(A);
    const EigenResult eig = jacobi_eigen_sym(M);
    const double threshold = 1e-10 * std::sqrt(M.frobenius_sq());

    // y = (AAᵀ)† r
    const std::size_t m = A.rows();
    Vector y(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
    {
        const double lambda = eig.eigenvalues[j];
        if (lambda <= threshold)
            continue;
        double coef = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            coef += eig.eigenvectors(k, j) * r[k];
        coef /= lambda;
        for (std::size_t k = 0; k < m; ++k)
            y[k] += coef * eig.eigenvectors(k, j);
    }

    const Vector correction = matvec_transposed(A, y);
    return {subtract(x0, correction), std::move(y)};
}

Vector least_norm_solution(const DenseMatrix& A, std::span<const double> b, std::span<const double> x0)
{
    Vector x = least_norm_solve(A, b, x0).x;

    Vector residual = matvec(A, x);
    for (std::size_t i = 0; i < residual.size(); ++i)
        residual[i] -= b[i];
    if (norm_inf(residual) > 1e-8 * (1.0 + norm_inf(b)))
        throw InconsistentSystem("least_norm_solution: residual " + std::to_string(norm_inf(residual)) +
                                 " exceeds tolerance");
    return x;
}

}  // namespace kaczmarz
