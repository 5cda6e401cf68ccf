#include "kaczmarz/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/sampler.hpp"

namespace kaczmarz {

namespace {

void check_step_inputs(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i)
{
    if (i >= A.rows())
        throw InvalidInput("row index " + std::to_string(i) + " out of range");
    if (x.size() != A.cols() || b.size() != A.rows())
        throw InvalidInput("step: dimension mismatch");
}

void check_rho(double rho)
{
    if (!(rho > 0.0))
        throw InvalidInput("penalty rho must be positive");
}

Vector move_along_row(std::span<const double> x, const DenseMatrix& A, std::size_t i, double coef)
{
    Vector out(x.begin(), x.end());
    if (coef == 0.0)
        return out;
    const auto a = A.row(i);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] -= coef * a[j];
    return out;
}

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

std::string_view to_string(Method method)
{
    switch (method)
    {
        case Method::RK: return "rk";
        case Method::RPK: return "rpk";
        case Method::RAK: return "rak";
    }
    return "?";
}

Method parse_method(std::string_view text)
{
    if (text == "rk")
        return Method::RK;
    if (text == "rpk")
        return Method::RPK;
    if (text == "rak")
        return Method::RAK;
    throw InvalidInput("unknown method '" + std::string(text) + "'");
}

Vector rk_step_ls(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i)
{
    check_step_inputs(x, A, b, i);
    const double r = dot(A.row(i), x) - b[i];
    return move_along_row(x, A, i, r / A.row_norm_sq(i));
}

Vector rk_step_lf(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i)
{
    check_step_inputs(x, A, b, i);
    const double r = positive_part(dot(A.row(i), x) - b[i]);
    return move_along_row(x, A, i, r / A.row_norm_sq(i));
}

Vector rpk_step_ls(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i,
                   double rho)
{
    check_rho(rho);
    check_step_inputs(x, A, b, i);
    const double r = dot(A.row(i), x) - b[i];
    return move_along_row(x, A, i, r / (1.0 / rho + A.row_norm_sq(i)));
}

Vector rpk_step_lf(std::span<const double> x, const DenseMatrix& A, std::span<const double> b, std::size_t i,
                   double rho)
{
    check_rho(rho);
    check_step_inputs(x, A, b, i);
    const double r = positive_part(dot(A.row(i), x) - b[i]);
    return move_along_row(x, A, i, r / (1.0 / rho + A.row_norm_sq(i)));
}

RakStep rak_step_ls(std::span<const double> x, double z, const DenseMatrix& A, std::span<const double> b,
                    std::size_t i, double rho)
{
    check_rho(rho);
    check_step_inputs(x, A, b, i);
    const double r = dot(A.row(i), x) - b[i];
    const double z_next = (r + z / rho) / (1.0 / rho + A.row_norm_sq(i));
    return {move_along_row(x, A, i, z_next), z_next};
}

RakStep rak_step_lf(std::span<const double> x, double z, const DenseMatrix& A, std::span<const double> b,
                    std::size_t i, double rho)
{
    check_rho(rho);
    if (z < 0.0)
        throw InvalidInput("rak_step_lf: multiplier must be nonnegative");
    check_step_inputs(x, A, b, i);
    const double r = dot(A.row(i), x) - b[i];
    const double z_next = positive_part(r + z / rho) / (1.0 / rho + A.row_norm_sq(i));
    return {move_along_row(x, A, i, z_next), z_next};
}

RakStep apply_step(Method method, ProblemKind kind, std::span<const double> x, double z, const DenseMatrix& A,
                   std::span<const double> b, std::size_t i, double rho)
{
    const bool ls = kind == ProblemKind::LS;
    switch (method)
    {
        case Method::RK: return {ls ? rk_step_ls(x, A, b, i) : rk_step_lf(x, A, b, i), z};
        case Method::RPK: return {ls ? rpk_step_ls(x, A, b, i, rho) : rpk_step_lf(x, A, b, i, rho), z};
        case Method::RAK: return ls ? rak_step_ls(x, z, A, b, i, rho) : rak_step_lf(x, z, A, b, i, rho);
    }
    throw InvalidInput("unknown method");
}

double advance_rho(double rho, double c, double rho_max) { return std::min(c * rho, rho_max); }

void SolverConfig::validate() const
{
    if (!(rho0 > 0.0) || !std::isfinite(rho0))
        throw InvalidInput("rho0 must be positive and finite");
    if (!(c >= 1.0) || !std::isfinite(c))
        throw InvalidInput("schedule multiplier c must be >= 1");
    if (!(rho_max >= rho0))
        throw InvalidInput("rho_max must be >= rho0");
    if (residual_tol && !(*residual_tol >= 0.0))
        throw InvalidInput("residual tolerance must be nonnegative");
}

double rho_at(const SolverConfig& cfg, std::size_t k)
{
    // closed form keeps rho_k bit-identical to the schedule formula; pow
    // overflowing to inf saturates at rho_max
    return std::min(cfg.rho0 * std::pow(cfg.c, static_cast<double>(k)), cfg.rho_max);
}

double residual_norm(const Problem& p, std::span<const double> x)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
    {
        const double r = row_dot(p.A(), i, x) - p.b()[i];
        worst = std::max(worst, p.kind() == ProblemKind::LS ? std::abs(r) : r);
    }
    return worst;
}

Problem effective_problem(const Problem& p, const SolverConfig& cfg)
{
    return cfg.normalize ? normalize_rows(p) : p;
}

Vector initial_point(const Problem& p, const SolverConfig& cfg)
{
    if (!cfg.x0)
        return Vector(p.cols(), 0.0);
    if (cfg.x0->size() != p.cols())
        throw InvalidInput("x0 has length " + std::to_string(cfg.x0->size()) + ", expected " +
                           std::to_string(p.cols()));
    if (!all_finite(*cfg.x0))
        throw InvalidInput("x0 must be finite");
    return *cfg.x0;
}

SolverState run_solver(const Problem& p, const SolverConfig& cfg, const IterationObserver& observer)
{
    cfg.validate();
    const Problem problem = effective_problem(p, cfg);
    const DenseMatrix& A = problem.A();
    const Vector& b = problem.b();
    const bool per_row = cfg.method == Method::RAK && cfg.multiplier_mode == MultiplierMode::PerRow;

    SolverState state;
    state.x = initial_point(problem, cfg);
    state.rho = rho_at(cfg, 0);
    if (per_row)
        state.row_multipliers.assign(problem.rows(), 0.0);

    RowSampler sampler(A, cfg.seed);
    if (observer)
        observer({0, -1, state});

    for (std::size_t k = 0; k < cfg.max_iters; ++k)
    {
        if (cfg.residual_tol && residual_norm(problem, state.x) <= *cfg.residual_tol)
            break;

        const std::size_t i = sampler.sample();
        const double z = per_row ? state.row_multipliers[i] : state.z;
        RakStep next = apply_step(cfg.method, problem.kind(), state.x, z, A, b, i, state.rho);
        if (!all_finite(next.x) || !std::isfinite(next.z))
            throw NumericFailure(k + 1, "non-finite iterate");

        state.x = std::move(next.x);
        state.z = next.z;
        if (per_row)
            state.row_multipliers[i] = next.z;
        state.k = k + 1;
        state.rho = rho_at(cfg, k + 1);
        if (observer)
            observer({k + 1, static_cast<std::ptrdiff_t>(i), state});
    }
    return state;
}

}  // namespace kaczmarz
