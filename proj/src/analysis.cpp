#include "kaczmarz/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/sampler.hpp"

namespace kaczmarz {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

Vector positive_residual(const DenseMatrix& A, std::span<const double> b, std::span<const double> x)
{
    Vector r(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        r[i] = positive_part(dot(A.row(i), x) - b[i]);
    return r;
}

double distance_sq(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
    {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

std::span<const double> require_x_star(const Problem& problem, std::optional<std::span<const double>> x_star)
{
    if (!x_star)
        throw InvalidInput("LS analysis needs the reference solution x*");
    if (x_star->size() != problem.cols())
        throw InvalidInput("x* has wrong length");
    return *x_star;
}

// Squared error of x against the reference set: ||x - x*||^2 or d(x, X)^2.
double error_sq(const Problem& problem, std::span<const double> x, std::span<const double> x_star)
{
    if (problem.kind() == ProblemKind::LS)
        return distance_sq(x, x_star);
    const double d = distance_to_feasible(x, problem);
    return d * d;
}

void check_enumerable(const Problem& problem)
{
    if (problem.rows() > kMaxEnumeratedRows)
        throw InvalidInput("expectation enumeration capped at " + std::to_string(kMaxEnumeratedRows) + " rows");
}

// Least squares over the listed columns by Householder QR. Columns whose
// pivot vanishes get coefficient zero.
Vector least_squares_on(const std::vector<Vector>& cols, const std::vector<std::size_t>& use, const Vector& f)
{
    const std::size_t p = f.size();
    const std::size_t k = use.size();
    std::vector<Vector> R(k);
    for (std::size_t j = 0; j < k; ++j)
        R[j] = cols[use[j]];
    Vector rhs = f;
    std::vector<char> dead(k, 0);
    double biggest = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        biggest = std::max(biggest, norm2(R[j]));

    std::size_t row = 0;
    std::vector<std::size_t> pivot_row(k, p);
    for (std::size_t j = 0; j < k && row < p; ++j)
    {
        double sigma = 0.0;
        for (std::size_t i = row; i < p; ++i)
            sigma += R[j][i] * R[j][i];
        const double norm = std::sqrt(sigma);
        if (norm <= 1e-13 * biggest)
        {
            dead[j] = 1;
            continue;
        }
        const double alpha = R[j][row] > 0.0 ? -norm : norm;
        Vector v(R[j].begin() + static_cast<std::ptrdiff_t>(row), R[j].end());
        v[0] -= alpha;
        const double vv = norm2_sq(v);
        auto reflect = [&](Vector& col) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += v[i] * col[row + i];
            s = 2.0 * s / vv;
            for (std::size_t i = 0; i < v.size(); ++i)
                col[row + i] -= s * v[i];
        };
        for (std::size_t c = j; c < k; ++c)
            reflect(R[c]);
        reflect(rhs);
        pivot_row[j] = row++;
    }
    for (std::size_t j = 0; j < k; ++j)
        if (pivot_row[j] == p)
            dead[j] = 1;

    Vector s(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;)
    {
        if (dead[jj])
            continue;
        const std::size_t r = pivot_row[jj];
        double acc = rhs[r];
        for (std::size_t c = jj + 1; c < k; ++c)
            if (!dead[c])
                acc -= R[c][r] * s[c];
        s[jj] = acc / R[jj][r];
    }
    return s;
}

// Lawson-Hanson nonnegative least squares: min ||E u - f|| over u >= 0,
// with E given by its columns.
Vector nnls(const std::vector<Vector>& cols, const Vector& f, double tol, int max_iterations, int& iterations)
{
    const std::size_t m = cols.size();
    Vector u(m, 0.0);
    std::vector<char> passive(m, 0), blocked(m, 0);
    double col_scale = 0.0;
    for (const Vector& c : cols)
        col_scale = std::max(col_scale, norm2(c));
    const double w_tol = tol * std::max(1.0, col_scale) * std::max(1.0, norm2(f));

    auto residual = [&] {
        Vector r = f;
        for (std::size_t j = 0; j < m; ++j)
            if (u[j] != 0.0)
                for (std::size_t i = 0; i < r.size(); ++i)
                    r[i] -= u[j] * cols[j][i];
        return r;
    };

    iterations = 0;
    while (true)
    {
        const Vector r = residual();
        std::size_t t = m;
        double best = w_tol;
        for (std::size_t j = 0; j < m; ++j)
        {
            if (passive[j] || blocked[j])
                continue;
            const double w = dot(cols[j], r);
            if (w > best)
            {
                best = w;
                t = j;
            }
        }
        if (t == m)
            return u;
        if (++iterations > max_iterations)
            throw ConvergenceFailure("project_polyhedron: no convergence after " + std::to_string(max_iterations) +
                                     " iterations");
        passive[t] = 1;

        bool first = true;
        while (true)
        {
            std::vector<std::size_t> use;
            for (std::size_t j = 0; j < m; ++j)
                if (passive[j])
                    use.push_back(j);
            const Vector s = least_squares_on(cols, use, f);

            // a new column that enters with a nonpositive coefficient is rounding noise
            if (first)
            {
                const auto pos = std::find(use.begin(), use.end(), t) - use.begin();
                if (s[static_cast<std::size_t>(pos)] <= 0.0)
                {
                    passive[t] = 0;
                    blocked[t] = 1;
                    break;
                }
            }
            first = false;

            double alpha = 1.0;
            std::size_t limiting = use.size();
            for (std::size_t q = 0; q < use.size(); ++q)
                if (s[q] <= 0.0)
                {
                    const double uj = u[use[q]];
                    const double a = uj / (uj - s[q]);
                    if (limiting == use.size() || a < alpha)
                    {
                        alpha = a;
                        limiting = q;
                    }
                }
            if (limiting == use.size())
            {
                for (std::size_t q = 0; q < use.size(); ++q)
                    u[use[q]] = s[q];
                std::fill(blocked.begin(), blocked.end(), 0);
                break;
            }
            for (std::size_t q = 0; q < use.size(); ++q)
            {
                const std::size_t j = use[q];
                u[j] += alpha * (s[q] - u[j]);
                if (q == limiting || u[j] <= 0.0)
                {
                    u[j] = 0.0;
                    passive[j] = 0;
                }
            }
            std::fill(blocked.begin(), blocked.end(), 0);
        }
    }
}

// Refine a projection by an exact solve on its active set.
// Rows are added while violated and dropped while their multiplier is
// negative; each solve gets one step of iterative refinement.
bool polish_on_active_set(std::span<const double> x, const DenseMatrix& A, std::span<const double> b,
                          PolyhedronProjection& proj)
{
    std::vector<char> in_set(A.rows(), 0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        in_set[i] = proj.multipliers[i] > 0.0;

    const double scale = 1.0 + norm_inf(b);
    const double feas_tol = 1e-14 * scale;
    for (std::size_t round = 0; round <= 2 * A.rows(); ++round)
    {
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < A.rows(); ++i)
            if (in_set[i])
                active.push_back(i);
        LeastNormResult sol;
        sol.x.assign(x.begin(), x.end());
        const DenseMatrix As = active.empty() ? DenseMatrix() : A.select_rows(active);
        Vector bs(active.size());
        for (std::size_t k = 0; k < active.size(); ++k)
            bs[k] = b[active[k]];

        try
        {
            if (!active.empty())
            {
                sol = least_norm_solve(As, bs, x);
                LeastNormResult fix = least_norm_solve(As, bs, sol.x);
                for (std::size_t k = 0; k < active.size(); ++k)
                    sol.dual[k] += fix.dual[k];
                sol.x = std::move(fix.x);
            }
        }
        catch (const Error&)
        {
            return false;
        }

        std::size_t drop = active.size();
        double most_negative = 0.0;
        for (std::size_t k = 0; k < active.size(); ++k)
            if (sol.dual[k] < most_negative)
            {
                most_negative = sol.dual[k];
                drop = k;
            }
        if (drop < active.size())
        {
            in_set[active[drop]] = 0;
            continue;
        }

        for (std::size_t k = 0; k < active.size(); ++k)
            if (std::abs(dot(As.row(k), sol.x) - bs[k]) > feas_tol)
                return false;

        std::size_t add = A.rows();
        double worst = feas_tol;
        for (std::size_t i = 0; i < A.rows(); ++i)
        {
            const double r = dot(A.row(i), sol.x) - b[i];
            if (!in_set[i] && r > worst)
            {
                worst = r;
                add = i;
            }
        }
        if (add < A.rows())
        {
            in_set[add] = 1;
            continue;
        }

        proj.point = std::move(sol.x);
        std::fill(proj.multipliers.begin(), proj.multipliers.end(), 0.0);
        for (std::size_t k = 0; k < active.size(); ++k)
            proj.multipliers[active[k]] = sol.dual[k];
        proj.polished = true;
        return true;
    }
    return false;
}

}  // namespace

double rate_gain(Method method, double rho)
{
    switch (method)
    {
        case Method::RK: return 1.0;
        case Method::RPK: return rho * (rho + 2.0) / ((1.0 + rho) * (1.0 + rho));
        case Method::RAK: return rho / (1.0 + rho);
    }
    return 0.0;
}

RateConstants rate_constants(Method method, ProblemKind kind, double rho, double lambda_or_L, std::size_t m)
{
    if (!(rho > 0.0))
        throw InvalidInput("rate_constants: rho must be positive");
    if (!(lambda_or_L > 0.0))
        throw InvalidInput("rate_constants: lambda_min / L must be positive");
    if (m == 0)
        throw InvalidInput("rate_constants: m must be positive");

    const double md = static_cast<double>(m);
    const double g = rate_gain(method, rho);
    const double reduction = kind == ProblemKind::LS ? g * lambda_or_L / md : g / (md * lambda_or_L * lambda_or_L);
    return {method, kind, rho, lambda_or_L, m, 1.0 - reduction};
}

LyapunovValue lyapunov_ls(std::span<const double> x, double z, double rho, std::span<const double> x_star)
{
    if (!(rho > 0.0))
        throw InvalidInput("lyapunov_ls: rho must be positive");
    if (x.size() != x_star.size())
        throw InvalidInput("lyapunov_ls: length mismatch");
    LyapunovValue v;
    v.error_part = distance_sq(x, x_star);
    v.dual_part = z * z / rho;
    v.value = v.error_part + v.dual_part;
    return v;
}

LyapunovValue lyapunov_lf(std::span<const double> x, double z, double rho, const Problem& problem)
{
    if (!(rho > 0.0))
        throw InvalidInput("lyapunov_lf: rho must be positive");
    if (z < 0.0)
        throw InvalidInput("lyapunov_lf: multiplier must be nonnegative");
    const double d = distance_to_feasible(x, problem);
    LyapunovValue v;
    v.error_part = d * d;
    v.dual_part = z * z / rho;
    v.value = v.error_part + v.dual_part;
    return v;
}

Vector project_affine(std::span<const double> x, const DenseMatrix& A, std::span<const double> b)
{
    return least_norm_solution(A, b, x);
}

PolyhedronProjection project_polyhedron(std::span<const double> x, const DenseMatrix& A, std::span<const double> b,
                                        double tol, int max_iterations)
{
    if (x.size() != A.cols() || b.size() != A.rows())
        throw InvalidInput("project_polyhedron: dimension mismatch");
    for (std::size_t i = 0; i < A.rows(); ++i)
        if (A.row_norm_sq(i) == 0.0)
            throw InvalidInput("project_polyhedron: zero row " + std::to_string(i));

    PolyhedronProjection proj;
    proj.point.assign(x.begin(), x.end());
    proj.multipliers.assign(A.rows(), 0.0);

    // Least-distance form: y = x + d, minimize ||d|| subject to -A d >= h,
    // h = A x - b. Its dual is a nonnegative least-squares problem in
    // u >= 0 over the columns (-a_i, h_i) with target e_{n+1}.
    const std::size_t n = A.cols();
    Vector h(A.rows());
    bool feasible = true;
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        h[i] = dot(A.row(i), x) - b[i];
        feasible = feasible && h[i] <= 0.0;
    }
    if (!feasible)
    {
        std::vector<Vector> cols(A.rows(), Vector(n + 1));
        for (std::size_t i = 0; i < A.rows(); ++i)
        {
            for (std::size_t j = 0; j < n; ++j)
                cols[i][j] = -A(i, j);
            cols[i][n] = h[i];
        }
        Vector f(n + 1, 0.0);
        f[n] = 1.0;
        const Vector u = nnls(cols, f, tol, max_iterations, proj.iterations);

        double last = -1.0;
        for (std::size_t i = 0; i < A.rows(); ++i)
            last += u[i] * h[i];
        if (!(last < -1e-12))
            throw InconsistentSystem("project_polyhedron: the constraints are infeasible");
        for (std::size_t i = 0; i < A.rows(); ++i)
        {
            proj.multipliers[i] = u[i] / -last;
            if (proj.multipliers[i] != 0.0)
                for (std::size_t j = 0; j < n; ++j)
                    proj.point[j] -= proj.multipliers[i] * A(i, j);
        }
        PolyhedronProjection refined = proj;
        if (polish_on_active_set(x, A, b, refined))
            proj = std::move(refined);
    }

    const double scale = 1.0 + norm_inf(b);
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        const double r = dot(A.row(i), proj.point) - b[i];
        proj.max_violation = std::max(proj.max_violation, positive_part(r));
        proj.complementarity = std::max(proj.complementarity, proj.multipliers[i] * std::abs(r));
    }
    if (proj.max_violation > 1e-8 * scale)
        throw ConvergenceFailure("project_polyhedron: result violates constraints by " +
                                 std::to_string(proj.max_violation));
    if (proj.complementarity > 1e-8)
        throw ConvergenceFailure("project_polyhedron: complementary slackness violated by " +
                                 std::to_string(proj.complementarity));
    return proj;
}

double distance_to_feasible(std::span<const double> x, const Problem& problem)
{
    if (problem.kind() != ProblemKind::LF)
        throw InvalidInput("distance_to_feasible: problem is not a feasibility problem");
    const PolyhedronProjection proj = project_polyhedron(x, problem.A(), problem.b());
    return std::sqrt(distance_sq(x, proj.point));
}

HoffmanEstimate hoffman_estimate(const Problem& problem, std::size_t n_samples, double radius, std::uint64_t seed)
{
    if (problem.kind() != ProblemKind::LF)
        throw InvalidInput("hoffman_estimate: problem is not a feasibility problem");
    if (n_samples == 0)
        throw InvalidInput("hoffman_estimate: n_samples must be positive");
    if (!(radius > 0.0))
        throw InvalidInput("hoffman_estimate: radius must be positive");

    const std::size_t n = problem.cols();
    const Vector center = problem.planted()
                              ? *problem.planted()
                              : project_polyhedron(Vector(n, 0.0), problem.A(), problem.b()).point;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double floor = 1e-14 * (1.0 + norm_inf(problem.b()));

    HoffmanEstimate est;
    Vector x(n);
    for (std::size_t s = 0; s < n_samples; ++s)
    {
        Vector dir(n);
        for (double& d : dir)
            d = normal(rng);
        const double len = norm2(dir);
        const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
        for (std::size_t j = 0; j < n; ++j)
            x[j] = center[j] + (len > 0.0 ? r * dir[j] / len : 0.0);

        const double resid = norm2(positive_residual(problem.A(), problem.b(), x));
        if (resid <= floor)
            continue;
        const double ratio = distance_to_feasible(x, problem) / resid;
        est.L_hat = std::max(est.L_hat, ratio);
        ++est.contributing;
    }
    if (est.contributing == 0)
        throw NoEstimate("hoffman_estimate: every sampled point is feasible; enlarge the radius");
    return est;
}

ExpectationReport exact_expected_step(const Problem& problem, std::span<const double> x, double z, Method method,
                                      double rho, std::optional<std::span<const double>> x_star)
{
    check_enumerable(problem);
    if (x.size() != problem.cols())
        throw InvalidInput("exact_expected_step: x has wrong length");
    std::span<const double> ref;
    if (problem.kind() == ProblemKind::LS)
        ref = require_x_star(problem, x_star);
    const bool rak = method == Method::RAK;
    if (rak && problem.kind() == ProblemKind::LF && z < 0.0)
        throw InvalidInput("exact_expected_step: RAK on LF needs z >= 0");

    ExpectationReport report;
    report.current_error = error_sq(problem, x, ref);
    report.current_lyapunov = report.current_error + (rak ? z * z / rho : 0.0);

    const std::vector<double> p = row_probabilities(problem.A());
    for (std::size_t i = 0; i < problem.rows(); ++i)
    {
        const RakStep next = apply_step(method, problem.kind(), x, z, problem.A(), problem.b(), i, rho);
        const double err = error_sq(problem, next.x, ref);
        report.expected_error += p[i] * err;
        if (rak)
        {
            report.expected_lyapunov += p[i] * (err + next.z * next.z / rho);
            report.expected_z_sq += p[i] * next.z * next.z;
        }
    }
    if (!rak)
        report.expected_lyapunov = report.expected_error;
    return report;
}

AdaptiveStepReport adaptive_step_report(const Problem& problem, std::span<const double> x, double z, double rho,
                                        double c, std::optional<std::span<const double>> x_star,
                                        std::optional<double> hoffman_L)
{
    check_enumerable(problem);
    if (!problem.normalized())
        throw InvalidInput("adaptive_step_report: rows must be normalized");
    if (!(rho > 0.0) || !(c >= 1.0))
        throw InvalidInput("adaptive_step_report: need rho > 0 and c >= 1");
    const bool ls = problem.kind() == ProblemKind::LS;
    if (!ls && z < 0.0)
        throw InvalidInput("adaptive_step_report: LF multiplier must be nonnegative");
    std::span<const double> ref;
    if (ls)
        ref = require_x_star(problem, x_star);

    const double m = static_cast<double>(problem.rows());
    const double rho_next = c * rho;
    const double err = error_sq(problem, x, ref);
    const double lyap = err + z * z / rho;

    AdaptiveStepReport report;
    const std::vector<double> p = row_probabilities(problem.A());
    for (std::size_t i = 0; i < problem.rows(); ++i)
    {
        const RakStep next = apply_step(Method::RAK, problem.kind(), x, z, problem.A(), problem.b(), i, rho);
        report.lhs += p[i] * (error_sq(problem, next.x, ref) + next.z * next.z / rho_next);
        report.expected_z_sq += p[i] * next.z * next.z;
    }

    const double common = lyap - z * z / (1.0 + rho) - (c - 1.0) / (c * rho) * report.expected_z_sq;
    if (ls)
    {
        const double lambda = lambda_min_variants(problem.A()).lambda_min;
        report.rhs = common - rho * lambda / (m * (1.0 + rho)) * err;
    }
    else
    {
        const double resid_sq = norm2_sq(positive_residual(problem.A(), problem.b(), x));
        report.rhs = common - rho * resid_sq / (m * (1.0 + rho));
        if (hoffman_L)
        {
            report.rhs_hoffman = common - rho / (m * *hoffman_L * *hoffman_L * (1.0 + rho)) * err;
            report.slack_hoffman = *report.rhs_hoffman - report.lhs;
        }
    }
    report.slack = report.rhs - report.lhs;
    return report;
}

CurveReport monte_carlo_error_curve(const Problem& problem, const SolverConfig& cfg, std::size_t n_trials,
                                    std::span<const std::size_t> checkpoints, const CurveOptions& options)
{
    if (n_trials == 0)
        throw InvalidInput("monte_carlo_error_curve: n_trials must be positive");
    if (checkpoints.empty())
        throw InvalidInput("monte_carlo_error_curve: no checkpoints");
    cfg.validate();

    const Problem eff = effective_problem(problem, cfg);
    const Vector x0 = initial_point(eff, cfg);
    const bool ls = eff.kind() == ProblemKind::LS;
    const bool rak = cfg.method == Method::RAK;
    const Vector x_star = ls ? least_norm_solution(eff.A(), eff.b(), x0) : Vector{};

    auto measure = [&](const SolverState& s, double& err, double& lyap) {
        err = error_sq(eff, s.x, x_star);
        double dual = 0.0;
        if (rak)
        {
            if (s.row_multipliers.empty())
                dual = s.z * s.z / s.rho;
            else
                dual = norm2_sq(s.row_multipliers) / s.rho;
        }
        lyap = err + dual;
    };

    CurveReport report;
    report.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    std::sort(report.checkpoints.begin(), report.checkpoints.end());
    report.checkpoints.erase(std::unique(report.checkpoints.begin(), report.checkpoints.end()),
                             report.checkpoints.end());
    const std::size_t n_cp = report.checkpoints.size();
    const std::size_t horizon = report.checkpoints.back();
    report.n_trials = n_trials;

    std::vector<double> sum_err(n_cp, 0.0);
    std::vector<double> sum_lyap(n_cp, 0.0);

    SolverConfig trial_cfg = cfg;
    trial_cfg.normalize = false;  // eff is already normalized when requested
    trial_cfg.x0 = x0;
    trial_cfg.max_iters = horizon;

    for (std::size_t t = 0; t < n_trials; ++t)
    {
        trial_cfg.seed = trial_seed(cfg.seed, t);
        std::vector<double> err(n_cp, 0.0);
        std::vector<double> lyap(n_cp, 0.0);
        std::size_t next_cp = 0;
        auto observer = [&](const IterationView& view) {
            while (next_cp < n_cp && report.checkpoints[next_cp] == view.k)
            {
                measure(view.state, err[next_cp], lyap[next_cp]);
                ++next_cp;
            }
        };
        const SolverState final_state = run_solver(eff, trial_cfg, observer);
        // early stop on the residual tolerance: later checkpoints hold the final state
        if (next_cp < n_cp)
        {
            double e = 0.0, l = 0.0;
            measure(final_state, e, l);
            for (; next_cp < n_cp; ++next_cp)
            {
                err[next_cp] = e;
                lyap[next_cp] = l;
            }
        }
        for (std::size_t c = 0; c < n_cp; ++c)
        {
            sum_err[c] += err[c];
            sum_lyap[c] += lyap[c];
        }
    }

    const double trials = static_cast<double>(n_trials);
    report.mean_error.resize(n_cp);
    report.mean_lyapunov.resize(n_cp);
    for (std::size_t c = 0; c < n_cp; ++c)
    {
        report.mean_error[c] = sum_err[c] / trials;
        report.mean_lyapunov[c] = sum_lyap[c] / trials;
    }

    // envelope
    SolverState start;
    start.x = x0;
    start.rho = rho_at(cfg, 0);
    double init_err = 0.0;
    measure(start, init_err, report.initial_value);

    if (ls)
        report.constant = lambda_min_variants(eff.A()).lambda_min;
    else if (options.hoffman_L)
        report.constant = *options.hoffman_L;
    else
    {
        try
        {
            report.constant =
                hoffman_estimate(eff, options.hoffman_samples, options.hoffman_radius, cfg.seed).L_hat;
        }
        catch (const NoEstimate&)
        {
            report.constant = 0.0;
        }
    }

    auto factor_at = [&](double rho) {
        if (report.constant <= 0.0)
            return 1.0;
        return rate_constants(cfg.method, eff.kind(), rho, report.constant, eff.rows()).per_step_factor;
    };
    report.per_step_factor = factor_at(rho_at(cfg, 0));

    report.envelope.resize(n_cp);
    double product = 1.0;
    std::size_t k = 0;
    for (std::size_t c = 0; c < n_cp; ++c)
    {
        for (; k < report.checkpoints[c]; ++k)
            product *= factor_at(rho_at(cfg, k));
        report.envelope[c] = product * report.initial_value;
    }
    return report;
}

}  // namespace kaczmarz
