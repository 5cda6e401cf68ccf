#include "kaczmarz/commands.hpp"

#include <cmath>
#include <ostream>

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/plot.hpp"
#include "kaczmarz/trace.hpp"
#include "kaczmarz/verify.hpp"

namespace kaczmarz {

int cmd_generate(const GenerateOptions& opts, std::ostream& out)
{
    if (opts.rows == 0 || opts.cols == 0)
        throw UsageError("--rows and --cols must be positive");
    if (opts.active_fraction && opts.kind != ProblemKind::LF)
        throw UsageError("--active-fraction only applies to --kind lf");
    const double fraction = opts.active_fraction.value_or(0.5);
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw UsageError("--active-fraction must lie in [0, 1]");

    Problem p = opts.kind == ProblemKind::LS ? generate_consistent_ls(opts.rows, opts.cols, opts.seed)
                                             : generate_feasible_lf(opts.rows, opts.cols, opts.seed, fraction);
    if (opts.normalize)
        p = normalize_rows(p);
    save_problem(p, opts.output);

    out << "kind=" << to_string(p.kind()) << " m=" << p.rows() << " n=" << p.cols()
        << " frobenius_norm=" << format_number(std::sqrt(p.A().frobenius_sq())) << '\n';
    return kExitOk;
}

int cmd_solve(const SolveOptions& opts, std::ostream& out)
{
    if (opts.trace_stride == 0)
        throw UsageError("--trace-stride must be positive");
    if (opts.tol && !(*opts.tol >= 0.0))
        throw UsageError("--tol must be nonnegative");

    SolverConfig cfg;
    cfg.method = opts.method;
    cfg.rho0 = opts.rho0;
    cfg.c = opts.c;
    cfg.max_iters = opts.iters;
    cfg.seed = opts.seed;
    cfg.residual_tol = opts.tol;
    cfg.normalize = opts.normalize;
    try
    {
        cfg.validate();
    }
    catch (const InvalidInput& e)
    {
        throw UsageError(e.what());
    }

    const Problem p = load_problem(opts.problem);
    const TracedRun run = run_traced(p, cfg, opts.trace_stride);
    if (opts.trace)
        write_file_atomic(*opts.trace, format_trace_csv(run.records));
    out << run.summary.format() << '\n';
    return kExitOk;
}

int cmd_compare(const CompareOptions& opts, std::ostream& out)
{
    if (opts.methods.empty())
        throw UsageError("--methods must name at least one method");
    if (opts.trials == 0)
        throw UsageError("--trials must be positive");
    std::vector<std::size_t> checkpoints = opts.checkpoints;
    if (checkpoints.empty())
        checkpoints.push_back(opts.iters);
    for (std::size_t k : checkpoints)
        if (k > opts.iters)
            throw UsageError("checkpoint " + std::to_string(k) + " exceeds --iters " + std::to_string(opts.iters));

    const Problem p = load_problem(opts.problem);
    std::string table = "method,checkpoint,mean_error_sq,envelope\n";
    for (Method method : opts.methods)
    {
        SolverConfig cfg;
        cfg.method = method;
        cfg.rho0 = opts.rho0;
        cfg.c = opts.c;
        cfg.max_iters = opts.iters;
        cfg.seed = opts.seed;
        try
        {
            cfg.validate();
        }
        catch (const InvalidInput& e)
        {
            throw UsageError(e.what());
        }
        const CurveReport curve = monte_carlo_error_curve(p, cfg, opts.trials, checkpoints);
        for (std::size_t c = 0; c < curve.checkpoints.size(); ++c)
            table += std::string(to_string(method)) + ',' + std::to_string(curve.checkpoints[c]) + ',' +
                     format_number(curve.mean_error[c]) + ',' + format_number(curve.envelope[c]) + '\n';
    }
    out << table;
    return kExitOk;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out)
{
    bool known = false;
    for (std::string_view name : kSuiteNames)
        known = known || name == opts.suite;
    if (!known)
        throw UsageError("unknown suite '" + opts.suite + "'");

    const SuiteReport report = run_suite(opts.suite, opts.seed);
    out << report.format();
    const bool ok = report.all_passed();
    out << (ok ? "verify: all properties passed\n" : "verify: FAILED\n");
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_plot(const PlotOptions& opts, std::ostream& out)
{
    if (opts.traces.empty())
        throw UsageError("plot needs at least one trace file");

    std::vector<PlotSeries> series;
    for (const auto& path : opts.traces)
    {
        PlotSeries s;
        s.label = path.filename().string();
        try
        {
            s.records = parse_trace_csv(read_file(path));
        }
        catch (const ParseError& e)
        {
            throw Error(path.string() + ": " + e.what());
        }
        if (s.records.empty())
            throw InvalidInput(path.string() + ": trace has no data rows");
        series.push_back(std::move(s));
    }
    write_file_atomic(opts.output, render_svg(series, opts.log_y));
    out << "wrote " << opts.output.string() << " series=" << series.size() << '\n';
    return kExitOk;
}

}  // namespace kaczmarz
