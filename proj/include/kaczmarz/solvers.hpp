#pragma once

//
// Randomized Kaczmarz (RK), randomized penalty Kaczmarz (RPK) and randomized
// augmented Kaczmarz (RAK) step rules for Ax = b (LS) and Ax <= b (LF), the
// penalty schedule and the iteration driver.
//

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "kaczmarz/linalg.hpp"
#include "kaczmarz/problem.hpp"

namespace kaczmarz {

enum class Method { RK, RPK, RAK };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// How RAK carries its multiplier between iterations.
enum class MultiplierMode {
    Scalar,  ///< one z shared by all rows (default)
    PerRow,  ///< z_i per row, updated only when row i is sampled
};

struct RakStep
{
    Vector x;
    double z = 0.0;
};

// One-step rules. `i` indexes a row of A; `b` has A.rows() entries.

/// x - (a_iᵀx - b_i)/||a_i||^2 a_i
Vector rk_step_ls(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i);

/// x - (a_iᵀx - b_i)+/||a_i||^2 a_i
Vector rk_step_lf(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i);

/// x - (a_iᵀx - b_i)/(1/rho + ||a_i||^2) a_i
Vector rpk_step_ls(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i,
                   double rho);

/// x - (a_iᵀx - b_i)+/(1/rho + ||a_i||^2) a_i
Vector rpk_step_lf(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i,
                   double rho);

/// z' = (a_iᵀx - b_i + z/rho)/(1/rho + ||a_i||^2), x' = x - z' a_i
RakStep rak_step_ls(std::span<const double> x, double z, const DenseMatrix& A, std::span<const double> b,
                    std::size_t i, double rho);

/// z' = (a_iᵀx - b_i + z/rho)+/(1/rho + ||a_i||^2), x' = x - z' a_i. Requires z >= 0.
RakStep rak_step_lf(std::span<const double> x, double z, const DenseMatrix& A, std::span<const double> b,
                    std::size_t i, double rho);

/// Applies the rule for (method, kind). RK and RPK leave z untouched.
RakStep apply_step(Method method, ProblemKind kind, std::span<const double> x, double z, const DenseMatrix& A,
                   std::span<const double> b, std::size_t i, double rho);

/// min(c * rho, rho_max)
double advance_rho(double rho, double c, double rho_max);

inline constexpr double kDefaultRhoMax = 1e12;

struct SolverConfig
{
    Method method = Method::RK;
    double rho0 = 1.0;
    double c = 1.0;
    double rho_max = kDefaultRhoMax;
    std::size_t max_iters = 0;
    std::uint64_t seed = 0;
    std::optional<double> residual_tol;
    bool normalize = false;
    std::optional<Vector> x0;  ///< defaults to 0
    MultiplierMode multiplier_mode = MultiplierMode::Scalar;

    /// Throws InvalidInput unless rho0 > 0, c >= 1, rho_max >= rho0.
    void validate() const;
};

/// rho_k = min(rho0 * c^k, rho_max)
double rho_at(const SolverConfig& cfg, std::size_t k);

struct SolverState
{
    Vector x;
    double z = 0.0;  ///< RAK multiplier; in per-row mode the last updated entry
    double rho = 1.0;
    std::size_t k = 0;
    Vector row_multipliers;  ///< per-row mode only
};

/// Passed to the observer once for the k = 0 snapshot (row = -1) and once
/// after every step.
struct IterationView
{
    std::size_t k;
    std::ptrdiff_t row;
    const SolverState& state;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// ||Ax - b||_inf for LS, ||(Ax - b)+||_inf for LF.
double residual_norm(const Problem& p, std::span<const double> x);

/// Runs `cfg.max_iters` steps (fewer if the residual tolerance is met)
/// from x0 (default 0) and z0 = 0. If cfg.normalize, the problem is row
/// normalized first. Throws NumericFailure on a non-finite iterate.
SolverState run_solver(const Problem& p, const SolverConfig& cfg, const IterationObserver& observer = {});

/// The problem the run actually iterates on (normalized if requested).
Problem effective_problem(const Problem& p, const SolverConfig& cfg);

/// Starting point for the run: cfg.x0 or the zero vector.
Vector initial_point(const Problem& p, const SolverConfig& cfg);

}  // namespace kaczmarz
