#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kaczmarz/problem.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz {

/// One row of a trace CSV.
struct TraceRecord
{
    std::size_t k = 0;
    long long row = -1;      ///< -1 for the k = 0 snapshot
    double rho = 0.0;
    double error_sq = 0.0;   ///< ||x - x*||^2 (LS) or d(x, X)^2 (LF)
    double residual = 0.0;   ///< ||Ax - b||_inf (LS) or ||(Ax - b)+||_inf (LF)
    double z = 0.0;
    double lyapunov = 0.0;   ///< error_sq + z^2/rho for RAK, error_sq otherwise
    bool fresh = true;       ///< false when error_sq repeats the last LF projection

    bool operator==(const TraceRecord&) const = default;
};

inline constexpr std::string_view kTraceHeader = "k,row,rho,error_sq,residual,z,lyapunov,fresh";
inline constexpr std::size_t kDefaultTraceStride = 10;

/// Observer that turns solver iterations into TraceRecords. LF error_sq is
/// recomputed every `stride` iterations (and at k = 0).
class TraceRecorder
{
public:
    /// `problem` must be the problem the solver iterates on (normalized if
    /// requested); `x0` the run's starting point, used to define x* for LS.
    TraceRecorder(const Problem& problem, Method method, std::span<const double> x0,
                  std::size_t stride = kDefaultTraceStride);

    void operator()(const IterationView& view);

    const std::vector<TraceRecord>& records() const noexcept { return records_; }
    const Vector& x_star() const noexcept { return x_star_; }

    /// Fresh error_sq for an arbitrary point.
    double error_sq(std::span<const double> x) const;

private:
    const Problem& problem_;
    Method method_;
    std::size_t stride_;
    Vector x_star_;
    double last_error_ = 0.0;
    std::vector<TraceRecord> records_;
};

std::string format_trace_csv(const std::vector<TraceRecord>& records);

/// Parses and checks a trace: exact header, 8 fields per row, k strictly
/// increasing from 0, nonnegative error/residual/lyapunov. Throws ParseError.
std::vector<TraceRecord> parse_trace_csv(std::string_view text);

struct RunSummary
{
    Method method = Method::RK;
    ProblemKind kind = ProblemKind::LS;
    std::size_t m = 0;
    std::size_t n = 0;
    double rho0 = 0.0;
    double c = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations_executed = 0;
    double final_error_sq = 0.0;
    double final_residual = 0.0;
    double per_step_factor = 1.0;
    double wall_time_seconds = 0.0;

    /// Single key=value line, e.g. "method=rpk kind=ls m=20 ...".
    std::string format() const;
};

struct TracedRun
{
    SolverState state;
    std::vector<TraceRecord> records;
    RunSummary summary;
};

/// run_solver with a TraceRecorder attached and a filled-in summary.
TracedRun run_traced(const Problem& problem, const SolverConfig& cfg, std::size_t stride = kDefaultTraceStride);

/// Theoretical per-step factor for the run (LS: lambda_min of the effective
/// problem; LF: sampled Hoffman estimate). 1 when the bound is vacuous.
double theoretical_factor(const Problem& effective, const SolverConfig& cfg);

}  // namespace kaczmarz
