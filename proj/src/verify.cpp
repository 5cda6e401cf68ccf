#include "kaczmarz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/problem.hpp"
#include "kaczmarz/sampler.hpp"

namespace kaczmarz {

namespace {

std::string sci(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

class Tracker
{
public:
    Tracker(std::string name, double tolerance, bool asserted = true)
    {
        result_.name = std::move(name);
        result_.tolerance = tolerance;
        result_.asserted = asserted;
        result_.worst = -std::numeric_limits<double>::infinity();
    }

    template <typename Describe>
    void add(double violation, Describe&& describe)
    {
        if (std::isnan(violation))
            violation = std::numeric_limits<double>::infinity();
        ++result_.cases;
        if (violation > result_.worst)
        {
            result_.worst = violation;
            result_.worst_case = describe();
        }
    }

    PropertyResult finish() &&
    {
        if (result_.cases == 0)
            result_.worst = 0.0;
        return std::move(result_);
    }

private:
    PropertyResult result_;
};

Vector gaussian_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (double& e : v)
        e = scale * normal(rng);
    return v;
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double log_uniform_rho(std::mt19937_64& rng) { return std::pow(10.0, uniform(rng, -2.0, 2.0)); }

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) { return norm_inf(subtract(a, b)); }

// A random one-step scenario: problem, row, point, penalty, multiplier.
struct StepCase
{
    std::uint64_t problem_seed;
    Problem problem;
    std::size_t row;
    Vector x;
    double rho;
    double z;

    std::string describe(std::uint64_t suite_seed, std::size_t index) const
    {
        return "suite_seed=" + std::to_string(suite_seed) + " case=" + std::to_string(index) +
               " problem_seed=" + std::to_string(problem_seed) + " m=" + std::to_string(problem.rows()) +
               " n=" + std::to_string(problem.cols()) + " row=" + std::to_string(row) + " rho=" + sci(rho) +
               " z=" + sci(z);
    }
};

StepCase random_step_case(std::mt19937_64& rng, ProblemKind kind, bool normalize)
{
    const std::size_t m = uniform_index(rng, 1, 12);
    const std::size_t n = uniform_index(rng, 1, 8);
    const std::uint64_t pseed = rng();
    Problem p = kind == ProblemKind::LS ? generate_consistent_ls(m, n, pseed)
                                        : generate_feasible_lf(m, n, pseed, 0.5);
    if (normalize)
        p = normalize_rows(p);
    const std::size_t row = uniform_index(rng, 0, m - 1);
    Vector x = gaussian_vector(rng, n, uniform(rng, 0.5, 3.0));
    const double rho = log_uniform_rho(rng);
    const double z = uniform(rng, -5.0, 5.0);
    return {pseed, std::move(p), row, std::move(x), rho, z};
}

// Orthogonal projector onto null(A) from the eigendecomposition of AᵀA.
Vector null_space_component(const DenseMatrix& A, std::span<const double> v)
{
    const DenseMatrix G = gram_matrix(A);
    const EigenResult eig = jacobi_eigen_sym(G);
    const double threshold = 1e-10 * std::sqrt(G.frobenius_sq());
    const std::size_t n = A.cols();
    Vector out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
    {
        if (eig.eigenvalues[j] > threshold)
            continue;
        double c = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            c += eig.eigenvectors(k, j) * v[k];
        for (std::size_t k = 0; k < n; ++k)
            out[k] += c * eig.eigenvectors(k, j);
    }
    return out;
}

constexpr std::size_t kStepCases = 1000;

}  // namespace

bool SuiteReport::all_passed() const
{
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed(); });
}

std::string SuiteReport::format() const
{
    std::string out;
    for (const PropertyResult& p : properties)
    {
        out += !p.asserted ? "INFO " : (p.passed() ? "PASS " : "FAIL ");
        out += p.name + " cases=" + std::to_string(p.cases) + " worst=" + sci(p.worst) + " tol=" + sci(p.tolerance);
        if (!p.passed() || !p.asserted)
            out += " case: " + p.worst_case;
        out += '\n';
    }
    return out;
}

SuiteReport run_steps_suite(std::uint64_t seed, const StepRules& rules)
{
    std::mt19937_64 rng(seed);
    SuiteReport report;

    {
        Tracker t("steps.rpk_ls_residual_contraction", 1e-12);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const StepCase sc = random_step_case(rng, ProblemKind::LS, false);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const double pre = row_dot(A, sc.row, sc.x) - b[sc.row];
            const Vector next = rules.rpk_ls(sc.x, A, b, sc.row, sc.rho);
            const double post = row_dot(A, sc.row, next) - b[sc.row];
            t.add(rel(post, pre / (1.0 + sc.rho * A.row_norm_sq(sc.row))), [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        Tracker t("steps.rpk_lf_positive_part", 1e-12);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const StepCase sc = random_step_case(rng, ProblemKind::LF, false);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const double pre = row_dot(A, sc.row, sc.x) - b[sc.row];
            const Vector next = rules.rpk_lf(sc.x, A, b, sc.row, sc.rho);
            double v = 0.0;
            if (pre <= 0.0)
                v = max_abs_diff(next, sc.x);
            else
                v = rel(row_dot(A, sc.row, next) - b[sc.row], pre / (1.0 + sc.rho * A.row_norm_sq(sc.row)));
            t.add(v, [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        Tracker t("steps.rak_ls_dual_identity", 1e-12);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const StepCase sc = random_step_case(rng, ProblemKind::LS, false);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const RakStep next = rules.rak_ls(sc.x, sc.z, A, b, sc.row, sc.rho);
            const double dual = sc.z + sc.rho * (row_dot(A, sc.row, next.x) - b[sc.row]);
            Vector moved = sc.x;
            for (std::size_t j = 0; j < moved.size(); ++j)
                moved[j] -= next.z * A(sc.row, j);
            t.add(std::max(rel(next.z, dual), max_abs_diff(next.x, moved)), [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        Tracker t("steps.rak_lf_sign_and_case_split", 1e-12);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            StepCase sc = random_step_case(rng, ProblemKind::LF, false);
            sc.z = std::abs(sc.z);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const double pre = row_dot(A, sc.row, sc.x) - b[sc.row];
            const RakStep next = rules.rak_lf(sc.x, sc.z, A, b, sc.row, sc.rho);
            double v = std::max(0.0, -next.z);
            if (sc.z + sc.rho * pre < 0.0)
                v = std::max({v, max_abs_diff(next.x, sc.x), std::abs(next.z)});
            else
                v = std::max(v, rel(next.z, sc.z + sc.rho * (row_dot(A, sc.row, next.x) - b[sc.row])));
            t.add(v, [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        Tracker t("steps.rk_hits_row_constraint", 1e-12);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const ProblemKind kind = c % 2 == 0 ? ProblemKind::LS : ProblemKind::LF;
            const StepCase sc = random_step_case(rng, kind, false);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const double pre = row_dot(A, sc.row, sc.x) - b[sc.row];
            double v = 0.0;
            if (kind == ProblemKind::LF && pre <= 0.0)
                v = max_abs_diff(rules.rk_lf(sc.x, A, b, sc.row), sc.x);
            else
            {
                const Vector next = kind == ProblemKind::LS ? rules.rk_ls(sc.x, A, b, sc.row)
                                                            : rules.rk_lf(sc.x, A, b, sc.row);
                v = std::abs(row_dot(A, sc.row, next) - b[sc.row]) / (1.0 + std::abs(b[sc.row]));
            }
            t.add(v, [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        Tracker t("steps.large_rho_matches_rk", 1e-6);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const ProblemKind kind = c % 2 == 0 ? ProblemKind::LS : ProblemKind::LF;
            StepCase sc = random_step_case(rng, kind, true);
            sc.rho = 1e12;
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const bool ls = kind == ProblemKind::LS;
            const Vector rk = ls ? rules.rk_ls(sc.x, A, b, sc.row) : rules.rk_lf(sc.x, A, b, sc.row);
            const Vector rpk = ls ? rules.rpk_ls(sc.x, A, b, sc.row, sc.rho) : rules.rpk_lf(sc.x, A, b, sc.row, sc.rho);
            const RakStep rak =
                ls ? rules.rak_ls(sc.x, 0.0, A, b, sc.row, sc.rho) : rules.rak_lf(sc.x, 0.0, A, b, sc.row, sc.rho);
            t.add(std::max(max_abs_diff(rpk, rk), max_abs_diff(rak.x, rk)), [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        // ||x' - x*||^2 = ||x - x*||^2 - g(rho) r^2 on unit rows, g = rho(rho+2)/(1+rho)^2 (1 for RK)
        Tracker t("steps.ls_error_decrease_identity", 1e-10);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const StepCase sc = random_step_case(rng, ProblemKind::LS, true);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const Vector& x_star = *sc.problem.planted();
            const double r = row_dot(A, sc.row, sc.x) - b[sc.row];
            const double before = lyapunov_ls(sc.x, 0.0, 1.0, x_star).error_part;
            const double g = sc.rho * (sc.rho + 2.0) / ((1.0 + sc.rho) * (1.0 + sc.rho));
            const double after_rpk = lyapunov_ls(rules.rpk_ls(sc.x, A, b, sc.row, sc.rho), 0.0, 1.0, x_star).error_part;
            const double after_rk = lyapunov_ls(rules.rk_ls(sc.x, A, b, sc.row), 0.0, 1.0, x_star).error_part;
            const double scale = std::max(1.0, before);
            const double v = std::max(std::abs(after_rpk - (before - g * r * r)) / scale,
                                      std::abs(after_rk - (before - r * r)) / scale);
            t.add(v, [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        // V' = ||x - x*||^2 + z^2/(rho(1+rho)) - rho r^2/(1+rho) on unit rows
        Tracker t("steps.rak_ls_lyapunov_identity", 1e-10);
        for (std::size_t c = 0; c < kStepCases; ++c)
        {
            const StepCase sc = random_step_case(rng, ProblemKind::LS, true);
            const auto& A = sc.problem.A();
            const auto& b = sc.problem.b();
            const Vector& x_star = *sc.problem.planted();
            const double r = row_dot(A, sc.row, sc.x) - b[sc.row];
            const double err = lyapunov_ls(sc.x, 0.0, 1.0, x_star).error_part;
            const RakStep next = rules.rak_ls(sc.x, sc.z, A, b, sc.row, sc.rho);
            const double after = lyapunov_ls(next.x, next.z, sc.rho, x_star).value;
            const double want = err + sc.z * sc.z / (sc.rho * (1.0 + sc.rho)) - sc.rho * r * r / (1.0 + sc.rho);
            t.add(std::abs(after - want) / std::max(1.0, err + sc.z * sc.z / sc.rho),
                  [&] { return sc.describe(seed, c); });
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        // from x0 = 0 every LS iterate stays in the row space of A
        Tracker t("steps.ls_iterates_in_row_space", 1e-8);
        for (std::size_t c = 0; c < 30; ++c)
        {
            const std::size_t m = uniform_index(rng, 2, 8);
            const std::size_t n = m + uniform_index(rng, 1, 6);
            const std::uint64_t pseed = rng();
            const Problem p = generate_consistent_ls(m, n, pseed);
            const Method method = static_cast<Method>(c % 3);
            Vector x(n, 0.0);
            double z = 0.0;
            RowSampler sampler(p.A(), pseed);
            double worst = 0.0;
            for (std::size_t k = 0; k < 200; ++k)
            {
                const std::size_t i = sampler.sample();
                switch (method)
                {
                    case Method::RK: x = rules.rk_ls(x, p.A(), p.b(), i); break;
                    case Method::RPK: x = rules.rpk_ls(x, p.A(), p.b(), i, 1.0); break;
                    case Method::RAK:
                    {
                        RakStep s = rules.rak_ls(x, z, p.A(), p.b(), i, 1.0);
                        x = std::move(s.x);
                        z = s.z;
                        break;
                    }
                }
                worst = std::max(worst, norm2(null_space_component(p.A(), x)));
            }
            t.add(worst, [&] {
                return "suite_seed=" + std::to_string(seed) + " case=" + std::to_string(c) + " problem_seed=" +
                       std::to_string(pseed) + " m=" + std::to_string(m) + " n=" + std::to_string(n) +
                       " method=" + std::string(to_string(method));
            });
        }
        report.properties.push_back(std::move(t).finish());
    }
    return report;
}

SuiteReport run_theorems_suite(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    SuiteReport report;
    const double rhos[] = {0.1, 1.0, 10.0};

    Tracker thm1("theorems.rpk_ls_expected_error_bound", 1e-10);
    Tracker thm2("theorems.rak_ls_expected_lyapunov_bound", 1e-10);
    Tracker remark("theorems.rak_ls_adaptive_penalty_bound", 1e-10);
    for (std::size_t pi = 0; pi < 20; ++pi)
    {
        const std::uint64_t pseed = rng();
        const Problem p = normalize_rows(generate_consistent_ls(20, 10, pseed));
        const Vector x_star = least_norm_solution(p.A(), p.b(), Vector(p.cols(), 0.0));
        const double lambda = lambda_min_variants(p.A()).lambda_min;
        for (std::size_t s = 0; s < 4; ++s)
        {
            Vector x = gaussian_vector(rng, p.cols(), 2.0);
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] += x_star[j];
            const double z = uniform(rng, -5.0, 5.0);
            for (double rho : rhos)
            {
                auto describe = [&] {
                    return "suite_seed=" + std::to_string(seed) + " problem_seed=" + std::to_string(pseed) +
                           " state=" + std::to_string(s) + " rho=" + sci(rho) + " z=" + sci(z);
                };
                const ExpectationReport e1 = exact_expected_step(p, x, 0.0, Method::RPK, rho, x_star);
                const double f1 = rate_constants(Method::RPK, ProblemKind::LS, rho, lambda, p.rows()).per_step_factor;
                thm1.add(e1.expected_error - f1 * e1.current_error, describe);

                const ExpectationReport e2 = exact_expected_step(p, x, z, Method::RAK, rho, x_star);
                const double f2 = rate_constants(Method::RAK, ProblemKind::LS, rho, lambda, p.rows()).per_step_factor;
                thm2.add(e2.expected_lyapunov - f2 * e2.current_lyapunov, describe);

                for (double c : {1.0, 2.0, 4.0})
                    remark.add(-adaptive_step_report(p, x, z, rho, c, x_star).slack, describe);
            }
        }
    }
    report.properties.push_back(std::move(thm1).finish());
    report.properties.push_back(std::move(thm2).finish());
    report.properties.push_back(std::move(remark).finish());

    {
        // orthonormal rows make the lambda_min relaxation exact
        Tracker t("theorems.identity_matrix_bounds_are_tight", 1e-12);
        for (std::size_t m : {1, 2, 5, 20})
        {
            const Problem p(DenseMatrix::identity(m), Vector(m, 0.0), ProblemKind::LS, Vector(m, 0.0), true);
            const Vector x_star(m, 0.0);
            const Vector x = gaussian_vector(rng, m);
            for (double rho : rhos)
            {
                auto describe = [&] { return "m=" + std::to_string(m) + " rho=" + sci(rho); };
                const ExpectationReport e1 = exact_expected_step(p, x, 0.0, Method::RPK, rho, x_star);
                const double b1 =
                    rate_constants(Method::RPK, ProblemKind::LS, rho, 1.0, m).per_step_factor * e1.current_error;
                t.add(std::abs(e1.expected_error - b1) / std::max(1.0, b1), describe);

                const ExpectationReport e2 = exact_expected_step(p, x, 0.0, Method::RAK, rho, x_star);
                const double b2 =
                    rate_constants(Method::RAK, ProblemKind::LS, rho, 1.0, m).per_step_factor * e2.current_lyapunov;
                t.add(std::abs(e2.expected_lyapunov - b2) / std::max(1.0, b2), describe);
            }
        }
        report.properties.push_back(std::move(t).finish());
    }
    {
        Tracker t("theorems.rate_monotone_and_rpk_below_rak", 0.0);
        double prev_rpk = 2.0, prev_rak = 2.0;
        for (int e = -40; e <= 40; ++e)
        {
            const double rho = std::pow(10.0, e / 10.0);
            const double rpk = rate_constants(Method::RPK, ProblemKind::LS, rho, 0.5, 4).per_step_factor;
            const double rak = rate_constants(Method::RAK, ProblemKind::LS, rho, 0.5, 4).per_step_factor;
            const double v = std::max({rpk - prev_rpk, rak - prev_rak, rpk - rak, 0.0});
            t.add(v, [&] { return "rho=" + sci(rho); });
            prev_rpk = rpk;
            prev_rak = rak;
        }
        report.properties.push_back(std::move(t).finish());
    }

    // Monte Carlo against the unrolled bound
    {
        const std::uint64_t pseed = rng();
        const Problem p = normalize_rows(generate_consistent_ls(20, 10, pseed));
        const std::size_t checkpoints[] = {50, 100, 200};
        for (Method method : {Method::RPK, Method::RAK})
        {
            Tracker t("theorems.monte_carlo_envelope_" + std::string(to_string(method)), 1.10);
            SolverConfig cfg;
            cfg.method = method;
            cfg.rho0 = 1.0;
            cfg.seed = rng();
            const CurveReport curve = monte_carlo_error_curve(p, cfg, 200, checkpoints);
            for (std::size_t c = 0; c < curve.checkpoints.size(); ++c)
                t.add(curve.mean_lyapunov[c] / curve.envelope[c], [&] {
                    return "problem_seed=" + std::to_string(pseed) + " base_seed=" + std::to_string(cfg.seed) +
                           " k=" + std::to_string(curve.checkpoints[c]);
                });
            report.properties.push_back(std::move(t).finish());
        }

        Tracker t("theorems.large_rho_run_matches_rk", 1e-6);
        SolverConfig rk;
        rk.method = Method::RK;
        rk.seed = rng();
        SolverConfig rpk = rk;
        rpk.method = Method::RPK;
        rpk.rho0 = 1e12;
        const CurveReport a = monte_carlo_error_curve(p, rk, 20, checkpoints);
        const CurveReport b = monte_carlo_error_curve(p, rpk, 20, checkpoints);
        for (std::size_t c = 0; c < a.checkpoints.size(); ++c)
            t.add(std::abs(a.mean_error[c] - b.mean_error[c]) / std::max(a.mean_error[c], 1e-300),
                  [&] { return "k=" + std::to_string(a.checkpoints[c]) + " base_seed=" + std::to_string(rk.seed); });
        report.properties.push_back(std::move(t).finish());
    }
    return report;
}

SuiteReport run_lf_suite(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    SuiteReport report;
    const double rhos[] = {0.1, 1.0, 10.0};

    Tracker step_mono("lf.one_step_distance_nonincreasing", 1e-10);
    Tracker rpk_exp("lf.rpk_expected_distance_nonincreasing", 1e-10);
    Tracker rak_exp("lf.rak_expected_lyapunov_nonincreasing", 1e-10);
    Tracker remark("lf.rak_adaptive_penalty_bound", 1e-10);
    Tracker proj_check("lf.projection_feasible_and_idempotent", 2 * kProjectionTol);
    Tracker envelope("lf.rpk_envelope_with_sampled_hoffman", 1.10, false);

    std::vector<Problem> problems;
    std::vector<std::uint64_t> seeds;
    for (std::size_t pi = 0; pi < 8; ++pi)
    {
        seeds.push_back(rng());
        problems.push_back(normalize_rows(generate_feasible_lf(20, 10, seeds.back(), 0.5)));
    }

    for (std::size_t pi = 0; pi < problems.size(); ++pi)
    {
        const Problem& p = problems[pi];
        const auto& A = p.A();
        const auto& b = p.b();
        for (std::size_t s = 0; s < 3; ++s)
        {
            Vector x = gaussian_vector(rng, p.cols(), 2.0);
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] += (*p.planted())[j];
            const double z = uniform(rng, 0.0, 3.0);
            const double d = distance_to_feasible(x, p);

            const PolyhedronProjection proj = project_polyhedron(x, A, b);
            const PolyhedronProjection again = project_polyhedron(proj.point, A, b);
            proj_check.add(std::max(norm2(subtract(again.point, proj.point)), proj.max_violation),
                           [&] { return "problem_seed=" + std::to_string(seeds[pi]) + " state=" + std::to_string(s); });

            for (std::size_t i = 0; i < p.rows(); ++i)
            {
                auto describe = [&] {
                    return "problem_seed=" + std::to_string(seeds[pi]) + " state=" + std::to_string(s) +
                           " row=" + std::to_string(i);
                };
                step_mono.add(distance_to_feasible(rk_step_lf(x, A, b, i), p) - d, describe);
                step_mono.add(distance_to_feasible(rpk_step_lf(x, A, b, i, 1.0), p) - d, describe);
            }
            for (double rho : rhos)
            {
                auto describe = [&] {
                    return "problem_seed=" + std::to_string(seeds[pi]) + " state=" + std::to_string(s) +
                           " rho=" + sci(rho) + " z=" + sci(z);
                };
                const ExpectationReport e1 = exact_expected_step(p, x, 0.0, Method::RPK, rho);
                rpk_exp.add(e1.expected_error - e1.current_error, describe);
                const ExpectationReport e2 = exact_expected_step(p, x, z, Method::RAK, rho);
                rak_exp.add(e2.expected_lyapunov - e2.current_lyapunov, describe);
                remark.add(-adaptive_step_report(p, x, z, rho, 2.0).slack, describe);
            }
        }
    }

    Tracker runs("lf.runs_reach_feasibility", 1e-6);
    Tracker sign("lf.rak_multiplier_nonnegative", 0.0);
    for (std::size_t pi = 0; pi < 3; ++pi)
    {
        for (Method method : {Method::RK, Method::RPK, Method::RAK})
        {
            SolverConfig cfg;
            cfg.method = method;
            cfg.rho0 = 1.0;
            cfg.max_iters = 200000;
            cfg.residual_tol = 1e-6;
            cfg.seed = rng();
            double most_negative = 0.0;
            const SolverState s = run_solver(problems[pi], cfg, [&](const IterationView& v) {
                most_negative = std::min(most_negative, v.state.z);
            });
            auto describe = [&] {
                return "problem_seed=" + std::to_string(seeds[pi]) + " method=" + std::string(to_string(method)) +
                       " seed=" + std::to_string(cfg.seed);
            };
            runs.add(residual_norm(problems[pi], s.x), describe);
            if (method == Method::RAK)
                sign.add(std::max(0.0, -most_negative), describe);
        }
    }

    {
        SolverConfig cfg;
        cfg.method = Method::RPK;
        cfg.seed = rng();
        const std::size_t checkpoints[] = {50, 100, 200};
        const CurveReport curve = monte_carlo_error_curve(problems[0], cfg, 50, checkpoints);
        for (std::size_t c = 0; c < curve.checkpoints.size(); ++c)
            envelope.add(curve.mean_error[c] / curve.envelope[c], [&] {
                return "L_hat=" + sci(curve.constant) + " k=" + std::to_string(curve.checkpoints[c]);
            });
    }

    Tracker hoffman("lf.hoffman_single_halfspace", 1e-8);
    for (std::size_t c = 0; c < 5; ++c)
    {
        Vector a = gaussian_vector(rng, 4);
        const double len = norm2(a);
        for (double& e : a)
            e /= len;
        const Vector planted = gaussian_vector(rng, 4);
        const double rhs = dot(a, planted);
        const Problem p(DenseMatrix(1, 4, a), Vector{rhs}, ProblemKind::LF, planted, true);
        const HoffmanEstimate est = hoffman_estimate(p, 200, 1.0, rng());
        hoffman.add(std::abs(est.L_hat - 1.0), [&] { return "case=" + std::to_string(c); });
    }

    report.properties.push_back(std::move(step_mono).finish());
    report.properties.push_back(std::move(rpk_exp).finish());
    report.properties.push_back(std::move(rak_exp).finish());
    report.properties.push_back(std::move(remark).finish());
    report.properties.push_back(std::move(proj_check).finish());
    report.properties.push_back(std::move(runs).finish());
    report.properties.push_back(std::move(sign).finish());
    report.properties.push_back(std::move(hoffman).finish());
    report.properties.push_back(std::move(envelope).finish());
    return report;
}

SuiteReport run_suite(std::string_view suite, std::uint64_t seed, const StepRules& rules)
{
    if (suite == "steps")
        return run_steps_suite(seed, rules);
    if (suite == "theorems")
        return run_theorems_suite(seed);
    if (suite == "lf")
        return run_lf_suite(seed);
    if (suite == "all")
    {
        SuiteReport all = run_steps_suite(seed, rules);
        for (SuiteReport part : {run_theorems_suite(seed), run_lf_suite(seed)})
            all.properties.insert(all.properties.end(), part.properties.begin(), part.properties.end());
        return all;
    }
    throw InvalidInput("unknown suite '" + std::string(suite) + "'");
}

}  // namespace kaczmarz
