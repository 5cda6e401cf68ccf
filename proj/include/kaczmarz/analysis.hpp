#pragma once

//
// Convergence diagnostics: per-step rate constants, Lyapunov functions,
// projections onto the solution set / feasible region, Hoffman constant
// estimates, exact one-step expectations and Monte Carlo error curves.
//

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kaczmarz/linalg.hpp"
#include "kaczmarz/problem.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz {

struct RateConstants
{
    Method method;
    ProblemKind kind;
    double rho;
    double constant;  ///< lambda_min(AᵀA) for LS, Hoffman L for LF
    std::size_t m;
    double per_step_factor;
};

/// Contraction factor of the expected error per iteration, unit rows assumed:
///   LS  1 - g(rho) lambda_min / m
///   LF  1 - g(rho) / (m L^2)
/// with g = rho(rho+2)/(1+rho)^2 for RPK, rho/(1+rho) for RAK and 1 for RK.
RateConstants rate_constants(Method method, ProblemKind kind, double rho, double lambda_or_L, std::size_t m);

/// g(rho) above.
double rate_gain(Method method, double rho);

struct LyapunovValue
{
    double value = 0.0;
    double error_part = 0.0;
    double dual_part = 0.0;
};

/// ||x - x*||^2 + z^2/rho
LyapunovValue lyapunov_ls(std::span<const double> x, double z, double rho, std::span<const double> x_star);

/// d(x, X)^2 + z^2/rho, X = {y : Ay <= b}
LyapunovValue lyapunov_lf(std::span<const double> x, double z, double rho, const Problem& problem);

/// Nearest point to x on {y : Ay = b}.
Vector project_affine(std::span<const double> x, const DenseMatrix& A, std::span<const double> b);

struct PolyhedronProjection
{
    Vector point;
    Vector multipliers;  ///< nonnegative, one per row
    int iterations = 0;                ///< outer NNLS iterations
    bool polished = false;             ///< refined by an exact active-set solve
    double max_violation = 0.0;        ///< ||(A point - b)+||_inf
    double complementarity = 0.0;      ///< max_i multiplier_i * |b_i - a_iᵀ point|
};

inline constexpr double kProjectionTol = 1e-12;
inline constexpr int kProjectionMaxIterations = 10000;

/// Euclidean projection onto {y : Ay <= b}, solved as a least-distance
/// problem through Lawson-Hanson NNLS, then refined by an exact solve on the
/// active set when that solve satisfies the KKT conditions. Throws
/// InconsistentSystem for an empty polyhedron and ConvergenceFailure at the
/// iteration cap or when the result cannot be certified (violation or
/// complementarity above 1e-8).
PolyhedronProjection project_polyhedron(std::span<const double> x, const DenseMatrix& A,
                                        std::span<const double> b, double tol = kProjectionTol,
                                        int max_iterations = kProjectionMaxIterations);

/// d(x, X) for an LF problem.
double distance_to_feasible(std::span<const double> x, const Problem& problem);

struct HoffmanEstimate
{
    double L_hat = 0.0;
    std::size_t contributing = 0;  ///< infeasible samples that entered the maximum
};

/// Running max of d(x, X) / ||(Ax - b)+|| over seeded points uniform in a
/// ball around the planted witness (or the projection of 0 when absent).
/// A lower bound on any valid Hoffman constant. Throws NoEstimate when every
/// sample is feasible.
HoffmanEstimate hoffman_estimate(const Problem& problem, std::size_t n_samples, double radius, std::uint64_t seed);

struct ExpectationReport
{
    double current_error = 0.0;       ///< ||x - x*||^2 or d(x, X)^2
    double current_lyapunov = 0.0;    ///< RAK: V or U; otherwise = current_error
    double expected_error = 0.0;      ///< E_i of the error after one step
    double expected_lyapunov = 0.0;   ///< E_i of V' or U' (RAK); otherwise = expected_error
    double expected_z_sq = 0.0;       ///< E_i z'^2 (RAK)
};

inline constexpr std::size_t kMaxEnumeratedRows = 10000;

/// Exact E_i[.] over one step from (x, z) by enumerating every row i with
/// weight p_i = ||a_i||^2/||A||_F^2. `x_star` is required for LS problems.
ExpectationReport exact_expected_step(const Problem& problem, std::span<const double> x, double z, Method method,
                                      double rho, std::optional<std::span<const double>> x_star = std::nullopt);

struct AdaptiveStepReport
{
    double lhs = 0.0;   ///< E_i of V or U at k+1, weighted by 1/rho_{k+1} = 1/(c rho_k)
    double rhs = 0.0;   ///< bound using lambda_min (LS) or ||(Ax - b)+||^2 (LF)
    double slack = 0.0; ///< rhs - lhs
    std::optional<double> rhs_hoffman;    ///< LF bound with the given L (diagnostic)
    std::optional<double> slack_hoffman;
    double expected_z_sq = 0.0;
};

/// Both sides of the adaptive-penalty per-step RAK inequality
///   E_i V_{k+1} <= V_k - rho lambda_min/(m(1+rho)) ||x - x*||^2 - z^2/(1+rho) - (c-1)/(c rho) E_i z'^2
/// (LF: d(x,X)^2 in place of ||x - x*||^2 with ||(Ax-b)+||^2 in place of lambda_min ||x - x*||^2;
/// the Hoffman form with L is reported separately). Requires unit rows.
AdaptiveStepReport adaptive_step_report(const Problem& problem, std::span<const double> x, double z, double rho,
                                        double c, std::optional<std::span<const double>> x_star = std::nullopt,
                                        std::optional<double> hoffman_L = std::nullopt);

struct CurveOptions
{
    std::optional<double> hoffman_L;  ///< LF envelope constant; estimated if absent
    std::size_t hoffman_samples = 256;
    double hoffman_radius = 1.0;
};

struct CurveReport
{
    std::vector<std::size_t> checkpoints;
    std::vector<double> mean_error;     ///< ||x_k - x*||^2 or d(x_k, X)^2
    std::vector<double> mean_lyapunov;  ///< V/U for RAK; equal to mean_error otherwise
    std::vector<double> envelope;       ///< initial * prod_{j<k} factor(rho_j)
    double initial_value = 0.0;         ///< initial lyapunov (= initial error unless RAK)
    double per_step_factor = 1.0;       ///< factor at rho0
    double constant = 0.0;              ///< lambda_min or L used for the envelope
    std::size_t n_trials = 0;
};

/// Mean error over n_trials independent runs (trial t seeded with
/// cfg.seed + t) at each checkpoint, plus the theoretical envelope.
CurveReport monte_carlo_error_curve(const Problem& problem, const SolverConfig& cfg, std::size_t n_trials,
                                    std::span<const std::size_t> checkpoints, const CurveOptions& options = {});

}  // namespace kaczmarz
