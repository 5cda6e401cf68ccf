#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/problem.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz {

/// Bad flag values or combinations; the CLI exits with code 2.
class UsageError : public Error
{
public:
    using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct GenerateOptions
{
    ProblemKind kind = ProblemKind::LS;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint64_t seed = 0;
    std::optional<double> active_fraction;  ///< LF only, default 0.5
    bool normalize = false;
    std::filesystem::path output;
};

struct SolveOptions
{
    std::filesystem::path problem;
    Method method = Method::RK;
    double rho0 = 1.0;
    double c = 1.0;
    std::size_t iters = 0;
    std::uint64_t seed = 0;
    std::optional<double> tol;
    bool normalize = false;
    std::optional<std::filesystem::path> trace;
    std::size_t trace_stride = 10;
};

struct CompareOptions
{
    std::filesystem::path problem;
    std::vector<Method> methods;
    double rho0 = 1.0;
    double c = 1.0;
    std::size_t iters = 0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::vector<std::size_t> checkpoints;
};

struct VerifyOptions
{
    std::string suite = "all";
    std::uint64_t seed = 0;
};

struct PlotOptions
{
    std::vector<std::filesystem::path> traces;
    std::filesystem::path output;
    bool log_y = false;
};

// Each command writes its report to `out` and returns an exit code.
int cmd_generate(const GenerateOptions& opts, std::ostream& out);
int cmd_solve(const SolveOptions& opts, std::ostream& out);
int cmd_compare(const CompareOptions& opts, std::ostream& out);
int cmd_verify(const VerifyOptions& opts, std::ostream& out);
int cmd_plot(const PlotOptions& opts, std::ostream& out);

/// Parses argv, dispatches to a command and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kaczmarz
