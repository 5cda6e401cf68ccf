#include "kaczmarz/trace.hpp"

#include <chrono>
#include <charconv>
#include <cmath>

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/sampler.hpp"

namespace kaczmarz {

namespace {

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true)
    {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos)
        {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

template <typename T>
T parse_field(std::string_view token, std::size_t line, const char* name)
{
    T value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
        throw ParseError(line, std::string("invalid ") + name + " '" + std::string(token) + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(value))
            throw ParseError(line, std::string("non-finite ") + name);
    return value;
}

}  // namespace

TraceRecorder::TraceRecorder(const Problem& problem, Method method, std::span<const double> x0, std::size_t stride)
    : problem_(problem), method_(method), stride_(stride == 0 ? 1 : stride)
{
    if (problem_.kind() == ProblemKind::LS)
        x_star_ = least_norm_solution(problem_.A(), problem_.b(), x0);
}

double TraceRecorder::error_sq(std::span<const double> x) const
{
    if (problem_.kind() == ProblemKind::LS)
        return lyapunov_ls(x, 0.0, 1.0, x_star_).error_part;
    const double d = distance_to_feasible(x, problem_);
    return d * d;
}

void TraceRecorder::operator()(const IterationView& view)
{
    TraceRecord rec;
    rec.k = view.k;
    rec.row = view.row;
    rec.rho = view.state.rho;
    rec.z = view.state.z;
    rec.residual = residual_norm(problem_, view.state.x);

    rec.fresh = problem_.kind() == ProblemKind::LS || view.k % stride_ == 0;
    if (rec.fresh)
        last_error_ = error_sq(view.state.x);
    rec.error_sq = last_error_;

    rec.lyapunov = rec.error_sq;
    if (method_ == Method::RAK)
    {
        const double dual_sq =
            view.state.row_multipliers.empty() ? view.state.z * view.state.z : norm2_sq(view.state.row_multipliers);
        rec.lyapunov += dual_sq / view.state.rho;
    }
    records_.push_back(rec);
}

std::string format_trace_csv(const std::vector<TraceRecord>& records)
{
    std::string out(kTraceHeader);
    out += '\n';
    for (const TraceRecord& r : records)
    {
        out += std::to_string(r.k) + ',' + std::to_string(r.row) + ',' + format_number(r.rho) + ',' +
               format_number(r.error_sq) + ',' + format_number(r.residual) + ',' + format_number(r.z) + ',' +
               format_number(r.lyapunov) + ',' + (r.fresh ? "1" : "0") + '\n';
    }
    return out;
}

std::vector<TraceRecord> parse_trace_csv(std::string_view text)
{
    std::vector<TraceRecord> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size())
    {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        if (!header_seen)
        {
            if (line != kTraceHeader)
                throw ParseError(line_no, "expected trace header '" + std::string(kTraceHeader) + "'");
            header_seen = true;
            continue;
        }
        if (line.empty())
        {
            if (pos >= text.size())
                break;
            throw ParseError(line_no, "empty line inside trace");
        }

        const auto fields = split_csv(line);
        if (fields.size() != 8)
            throw ParseError(line_no, "expected 8 fields, found " + std::to_string(fields.size()));

        TraceRecord r;
        r.k = parse_field<std::size_t>(fields[0], line_no, "k");
        r.row = parse_field<long long>(fields[1], line_no, "row");
        r.rho = parse_field<double>(fields[2], line_no, "rho");
        r.error_sq = parse_field<double>(fields[3], line_no, "error_sq");
        r.residual = parse_field<double>(fields[4], line_no, "residual");
        r.z = parse_field<double>(fields[5], line_no, "z");
        r.lyapunov = parse_field<double>(fields[6], line_no, "lyapunov");
        if (fields[7] != "0" && fields[7] != "1")
            throw ParseError(line_no, "fresh must be 0 or 1");
        r.fresh = fields[7] == "1";

        if (records.empty() ? r.k != 0 : r.k <= records.back().k)
            throw ParseError(line_no, records.empty() ? "trace must start at k = 0" : "k must strictly increase");
        if (r.row < -1)
            throw ParseError(line_no, "row must be >= -1");
        if (r.error_sq < 0.0 || r.residual < 0.0 || r.lyapunov < 0.0)
            throw ParseError(line_no, "error_sq, residual and lyapunov must be nonnegative");
        records.push_back(r);
    }
    if (!header_seen)
        throw ParseError(1, "empty trace file");
    return records;
}

std::string RunSummary::format() const
{
    return "method=" + std::string(to_string(method)) + " kind=" + std::string(to_string(kind)) +
           " m=" + std::to_string(m) + " n=" + std::to_string(n) + " rho0=" + format_number(rho0) +
           " c=" + format_number(c) + " seed=" + std::to_string(seed) +
           " iterations_executed=" + std::to_string(iterations_executed) +
           " final_error_sq=" + format_number(final_error_sq) + " final_residual=" + format_number(final_residual) +
           " per_step_factor=" + format_number(per_step_factor) +
           " wall_time_seconds=" + format_number(wall_time_seconds) + " rng=" + std::string(kRngName);
}

double theoretical_factor(const Problem& effective, const SolverConfig& cfg)
{
    double constant = 0.0;
    if (effective.kind() == ProblemKind::LS)
        constant = lambda_min_variants(effective.A()).lambda_min;
    else
    {
        try
        {
            constant = hoffman_estimate(effective, 64, 1.0, cfg.seed).L_hat;
        }
        catch (const NoEstimate&)
        {
            constant = 0.0;
        }
    }
    if (constant <= 0.0)
        return 1.0;
    return rate_constants(cfg.method, effective.kind(), cfg.rho0, constant, effective.rows()).per_step_factor;
}

TracedRun run_traced(const Problem& problem, const SolverConfig& cfg, std::size_t stride)
{
    cfg.validate();
    const Problem eff = effective_problem(problem, cfg);
    const Vector x0 = initial_point(eff, cfg);

    SolverConfig inner = cfg;
    inner.normalize = false;
    inner.x0 = x0;

    TraceRecorder recorder(eff, cfg.method, x0, stride);
    const auto start = std::chrono::steady_clock::now();
    TracedRun run;
    run.state = run_solver(eff, inner, [&](const IterationView& v) { recorder(v); });
    const auto stop = std::chrono::steady_clock::now();
    run.records = recorder.records();

    RunSummary& s = run.summary;
    s.method = cfg.method;
    s.kind = eff.kind();
    s.m = eff.rows();
    s.n = eff.cols();
    s.rho0 = cfg.rho0;
    s.c = cfg.c;
    s.seed = cfg.seed;
    s.iterations_executed = run.state.k;
    s.final_error_sq = recorder.error_sq(run.state.x);
    s.final_residual = residual_norm(eff, run.state.x);
    s.per_step_factor = theoretical_factor(eff, cfg);
    s.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
    return run;
}

}  // namespace kaczmarz
