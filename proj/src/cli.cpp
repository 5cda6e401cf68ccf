#include <CLI11.hpp>

#include <ostream>
#include <sstream>

#include "kaczmarz/commands.hpp"

namespace kaczmarz {

namespace {

std::vector<std::string> split_list(const std::string& text, const char* flag)
{
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (item.empty())
            throw UsageError(std::string(flag) + ": empty list entry in '" + text + "'");
        items.push_back(item);
    }
    if (items.empty())
        throw UsageError(std::string(flag) + ": empty list");
    return items;
}

std::size_t parse_count(const std::string& text, const char* flag)
{
    std::size_t pos = 0;
    unsigned long long v = 0;
    try
    {
        if (text.empty() || text[0] == '-')
            throw std::invalid_argument(text);
        v = std::stoull(text, &pos);
    }
    catch (const std::exception&)
    {
        throw UsageError(std::string(flag) + ": '" + text + "' is not a nonnegative integer");
    }
    if (pos != text.size())
        throw UsageError(std::string(flag) + ": '" + text + "' is not a nonnegative integer");
    return static_cast<std::size_t>(v);
}

template <typename T, typename Parse>
T parse_enum(const std::string& text, Parse parse)
{
    try
    {
        return parse(text);
    }
    catch (const InvalidInput& e)
    {
        throw UsageError(e.what());
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Randomized Kaczmarz, penalty and augmented Kaczmarz solvers and diagnostics", "kaczmarz"};
    app.require_subcommand(1);

    GenerateOptions gen;
    std::string gen_kind;
    std::string gen_output;
    auto* generate = app.add_subcommand("generate", "Generate a random consistent LS or feasible LF problem");
    generate->add_option("--kind", gen_kind, "ls or lf")->required();
    generate->add_option("--rows", gen.rows, "Number of rows M")->required();
    generate->add_option("--cols", gen.cols, "Number of columns N")->required();
    generate->add_option("--seed", gen.seed, "RNG seed")->required();
    auto* fraction_opt = generate->add_option("--active-fraction", "Fraction of tight rows (lf, default 0.5)");
    generate->add_flag("--normalize", gen.normalize, "Scale rows to unit norm");
    generate->add_option("-o,--output", gen_output, "Output problem file")->required();

    SolveOptions solve;
    std::string solve_problem, solve_method, solve_trace;
    auto* solve_cmd = app.add_subcommand("solve", "Run one solver and optionally write a trace CSV");
    solve_cmd->add_option("problem", solve_problem, "Problem file")->required();
    solve_cmd->add_option("--method", solve_method, "rk, rpk or rak")->required();
    solve_cmd->add_option("--rho0", solve.rho0, "Initial penalty (default 1)");
    solve_cmd->add_option("--c", solve.c, "Penalty growth factor (default 1)");
    solve_cmd->add_option("--iters", solve.iters, "Iteration count K")->required();
    solve_cmd->add_option("--seed", solve.seed, "RNG seed (default 0)");
    auto* tol_opt = solve_cmd->add_option("--tol", "Stop when the residual norm is at most T");
    solve_cmd->add_flag("--normalize", solve.normalize, "Scale rows to unit norm before solving");
    auto* trace_opt = solve_cmd->add_option("--trace", solve_trace, "Trace CSV path");
    solve_cmd->add_option("--trace-stride", solve.trace_stride, "LF error refresh interval (default 10)");

    CompareOptions cmp;
    std::string cmp_problem, cmp_methods, cmp_checkpoints;
    auto* compare = app.add_subcommand("compare", "Monte Carlo mean error curves for several methods");
    compare->add_option("problem", cmp_problem, "Problem file")->required();
    compare->add_option("--methods", cmp_methods, "Comma separated methods")->required();
    compare->add_option("--rho0", cmp.rho0, "Initial penalty (default 1)");
    compare->add_option("--c", cmp.c, "Penalty growth factor (default 1)");
    compare->add_option("--iters", cmp.iters, "Iteration count K")->required();
    compare->add_option("--trials", cmp.trials, "Trials per method (default 1)");
    compare->add_option("--seed", cmp.seed, "Base RNG seed (default 0)");
    compare->add_option("--checkpoints", cmp_checkpoints, "Comma separated iteration counts (default K)");

    VerifyOptions ver;
    auto* verify = app.add_subcommand("verify", "Run property suites");
    verify->add_option("--suite", ver.suite, "steps, theorems, lf or all (default all)");
    verify->add_option("--seed", ver.seed, "Suite seed (default 0)");

    PlotOptions plot;
    std::vector<std::string> plot_traces;
    std::string plot_output;
    auto* plot_cmd = app.add_subcommand("plot", "Render trace CSVs as an SVG chart of error_sq against k");
    plot_cmd->add_option("traces", plot_traces, "Trace CSV files")->required();
    plot_cmd->add_option("-o,--output", plot_output, "Output SVG path")->required();
    plot_cmd->add_flag("--log-y", plot.log_y, "Logarithmic y axis");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try
    {
        if (generate->parsed())
        {
            gen.kind = parse_enum<ProblemKind>(gen_kind, parse_problem_kind);
            if (fraction_opt->count() > 0)
                gen.active_fraction = fraction_opt->as<double>();
            gen.output = gen_output;
            return cmd_generate(gen, out);
        }
        if (solve_cmd->parsed())
        {
            solve.problem = solve_problem;
            solve.method = parse_enum<Method>(solve_method, parse_method);
            if (tol_opt->count() > 0)
                solve.tol = tol_opt->as<double>();
            if (trace_opt->count() > 0)
                solve.trace = solve_trace;
            return cmd_solve(solve, out);
        }
        if (compare->parsed())
        {
            cmp.problem = cmp_problem;
            for (const std::string& m : split_list(cmp_methods, "--methods"))
                cmp.methods.push_back(parse_enum<Method>(m, parse_method));
            if (!cmp_checkpoints.empty())
                for (const std::string& k : split_list(cmp_checkpoints, "--checkpoints"))
                    cmp.checkpoints.push_back(parse_count(k, "--checkpoints"));
            return cmd_compare(cmp, out);
        }
        if (verify->parsed())
            return cmd_verify(ver, out);
        if (plot_cmd->parsed())
        {
            for (const std::string& t : plot_traces)
                plot.traces.emplace_back(t);
            plot.output = plot_output;
            return cmd_plot(plot, out);
        }
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const UsageError& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace kaczmarz
