#include "kaczmarz/problem.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

constexpr double kPlantedTol = 1e-10;
constexpr double kUnitRowTol = 1e-12;

// Largest violation of the planted witness: |Ax - b| for LS, (Ax - b)+ for LF.
double planted_violation(const DenseMatrix& A, const Vector& b, ProblemKind kind, const Vector& x)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        const double r = row_dot(A, i, x) - b[i];
        worst = std::max(worst, kind == ProblemKind::LS ? std::abs(r) : r);
    }
    return worst;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size())
    {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
            ++pos;
        std::size_t end = pos;
        while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])))
            ++end;
        if (end > pos)
            out.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

double parse_double(std::string_view token, std::size_t line)
{
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(line, "invalid number '" + std::string(token) + "'");
    if (!std::isfinite(value))
        throw ParseError(line, "non-finite number '" + std::string(token) + "'");
    return value;
}

std::size_t parse_size(std::string_view token, std::size_t line, const char* what)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value == 0)
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
    return value;
}

}  // namespace

std::string_view to_string(ProblemKind kind) { return kind == ProblemKind::LS ? "ls" : "lf"; }

ProblemKind parse_problem_kind(std::string_view text)
{
    if (text == "ls")
        return ProblemKind::LS;
    if (text == "lf")
        return ProblemKind::LF;
    throw InvalidInput("unknown problem kind '" + std::string(text) + "'");
}

Problem::Problem(DenseMatrix A, Vector b, ProblemKind kind, std::optional<Vector> planted, bool normalized)
    : A_(std::move(A)), b_(std::move(b)), kind_(kind), planted_(std::move(planted)), normalized_(normalized)
{
    if (A_.rows() == 0)
        throw InvalidInput("problem matrix is empty");
    if (b_.size() != A_.rows())
        throw InvalidInput("b has length " + std::to_string(b_.size()) + ", expected " +
                           std::to_string(A_.rows()));
    if (!all_finite(b_))
        throw InvalidInput("b entries must be finite");
    for (std::size_t i = 0; i < A_.rows(); ++i)
    {
        if (A_.row_norm_sq(i) == 0.0)
            throw InvalidInput("row " + std::to_string(i) + " of A is zero");
        if (normalized_ && std::abs(A_.row_norm_sq(i) - 1.0) > kUnitRowTol)
            throw InvalidInput("row " + std::to_string(i) + " is not unit length");
    }
    if (planted_)
    {
        if (planted_->size() != A_.cols())
            throw InvalidInput("planted solution has wrong length");
        if (!all_finite(*planted_))
            throw InvalidInput("planted solution must be finite");
        const double viol = planted_violation(A_, b_, kind_, *planted_);
        if (viol > kPlantedTol * (1.0 + norm_inf(b_)))
            throw InvalidInput("planted solution violates the system by " + std::to_string(viol));
    }
}

Problem generate_consistent_ls(std::size_t m, std::size_t n, std::uint64_t seed)
{
    if (m == 0 || n == 0)
        throw InvalidInput("generate_consistent_ls: m and n must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> entries(m * n);
    for (double& e : entries)
        e = normal(rng);
    Vector x(n);
    for (double& e : x)
        e = normal(rng);

    DenseMatrix A(m, n, std::move(entries));
    Vector b = matvec(A, x);
    return Problem(std::move(A), std::move(b), ProblemKind::LS, std::move(x));
}

std::size_t active_row_count(std::size_t m, double active_fraction)
{
    // guard against 0.3 * 10 = 3.0000000000000004 rounding up to 4
    const double raw = std::ceil(active_fraction * static_cast<double>(m) - 1e-9);
    return static_cast<std::size_t>(std::clamp(raw, 0.0, static_cast<double>(m)));
}

Problem generate_feasible_lf(std::size_t m, std::size_t n, std::uint64_t seed, double active_fraction)
{
    if (m == 0 || n == 0)
        throw InvalidInput("generate_feasible_lf: m and n must be positive");
    if (!(active_fraction >= 0.0 && active_fraction <= 1.0))
        throw InvalidInput("generate_feasible_lf: active_fraction must lie in [0, 1]");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> entries(m * n);
    for (double& e : entries)
        e = normal(rng);
    Vector x(n);
    for (double& e : x)
        e = normal(rng);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> active(m, false);
    const std::size_t n_active = active_row_count(m, active_fraction);
    for (std::size_t k = 0; k < n_active; ++k)
        active[order[k]] = true;

    DenseMatrix A(m, n, std::move(entries));
    Vector b = matvec(A, x);
    for (std::size_t i = 0; i < m; ++i)
        if (!active[i])
            b[i] += std::abs(normal(rng));
    return Problem(std::move(A), std::move(b), ProblemKind::LF, std::move(x));
}

Problem normalize_rows(const Problem& p)
{
    const DenseMatrix& A = p.A();
    std::vector<double> entries(A.entries().begin(), A.entries().end());
    Vector b = p.b();
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        if (A.row_norm_sq(i) == 0.0)
            throw InvalidInput("normalize_rows: row " + std::to_string(i) + " is zero");
        const double norm = std::sqrt(A.row_norm_sq(i));
        for (std::size_t j = 0; j < A.cols(); ++j)
            entries[i * A.cols() + j] /= norm;
        b[i] /= norm;
    }
    return Problem(DenseMatrix(A.rows(), A.cols(), std::move(entries)), std::move(b), p.kind(), p.planted(),
                   true);
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_problem(const Problem& p)
{
    std::string out = "kaczmarz-problem v1 " + std::string(to_string(p.kind())) + " " +
                      std::to_string(p.rows()) + " " + std::to_string(p.cols()) + "\n";
    for (std::size_t i = 0; i < p.rows(); ++i)
    {
        for (double a : p.A().row(i))
        {
            out += format_number(a);
            out += ' ';
        }
        out += format_number(p.b()[i]);
        out += '\n';
    }
    if (p.planted())
    {
        out += "planted";
        for (double x : *p.planted())
        {
            out += ' ';
            out += format_number(x);
        }
        out += '\n';
    }
    return out;
}

Problem parse_problem(std::string_view text)
{
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos <= text.size();)
    {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    // drop trailing blank lines
    while (!lines.empty() && split_ws(lines.back()).empty())
        lines.pop_back();
    if (lines.empty())
        throw ParseError(1, "empty problem file");

    const auto header = split_ws(lines[0]);
    if (header.size() != 5 || header[0] != "kaczmarz-problem" || header[1] != "v1")
        throw ParseError(1, "expected header 'kaczmarz-problem v1 <ls|lf> <m> <n>'");
    if (header[2] != "ls" && header[2] != "lf")
        throw ParseError(1, "unknown problem kind '" + std::string(header[2]) + "'");
    const ProblemKind kind = parse_problem_kind(header[2]);
    const std::size_t m = parse_size(header[3], 1, "row count");
    const std::size_t n = parse_size(header[4], 1, "column count");

    std::vector<double> entries;
    entries.reserve(m * n);
    Vector b(m);
    std::size_t line_no = 1;
    for (std::size_t i = 0; i < m; ++i)
    {
        line_no = i + 2;
        if (line_no > lines.size())
            throw ParseError(line_no, "expected " + std::to_string(m) + " data rows, found " + std::to_string(i));
        const auto tokens = split_ws(lines[line_no - 1]);
        if (!tokens.empty() && tokens[0] == "planted")
            throw ParseError(line_no, "expected " + std::to_string(m) + " data rows, found " + std::to_string(i));
        if (tokens.size() != n + 1)
            throw ParseError(line_no, "expected " + std::to_string(n + 1) + " numbers, found " +
                                          std::to_string(tokens.size()));
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            const double a = parse_double(tokens[j], line_no);
            norm_sq += a * a;
            entries.push_back(a);
        }
        b[i] = parse_double(tokens[n], line_no);
        if (norm_sq == 0.0)
            throw ParseError(line_no, "row " + std::to_string(i) + " of A is zero");
    }

    std::optional<Vector> planted;
    std::size_t next = m + 1;  // 0-based index of the line after the data rows
    if (next < lines.size())
    {
        line_no = next + 1;
        const auto tokens = split_ws(lines[next]);
        if (tokens.empty() || tokens[0] != "planted")
            throw ParseError(line_no, "unexpected content after " + std::to_string(m) + " data rows");
        if (tokens.size() != n + 1)
            throw ParseError(line_no, "planted line needs " + std::to_string(n) + " numbers");
        Vector x(n);
        for (std::size_t j = 0; j < n; ++j)
            x[j] = parse_double(tokens[j + 1], line_no);
        planted = std::move(x);
        ++next;
    }
    for (; next < lines.size(); ++next)
        if (!split_ws(lines[next]).empty())
            throw ParseError(next + 1, "unexpected trailing content");

    DenseMatrix A(m, n, std::move(entries));
    bool unit_rows = true;
    for (double r : A.row_norms_sq())
        unit_rows = unit_rows && std::abs(r - 1.0) <= kUnitRowTol;

    try
    {
        return Problem(std::move(A), std::move(b), kind, std::move(planted), unit_rows);
    }
    catch (const InvalidInput& e)
    {
        throw ParseError(planted ? m + 2 : 1, e.what());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out)
            throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void save_problem(const Problem& p, const std::filesystem::path& path) { write_file_atomic(path, format_problem(p)); }

Problem load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path)); }

}  // namespace kaczmarz
