#include <doctest.h>

#include <cmath>

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/sampler.hpp"
#include "support.hpp"

using namespace kaczmarz;

namespace {

// Solves the square system M y = r by Gaussian elimination with partial
// pivoting; returns false when M is numerically singular.
bool solve_dense(std::vector<std::vector<double>> M, Vector r, Vector& y)
{
    const std::size_t n = r.size();
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(M[i][c]) > std::abs(M[piv][c]))
                piv = i;
        if (std::abs(M[piv][c]) < 1e-12)
            return false;
        std::swap(M[c], M[piv]);
        std::swap(r[c], r[piv]);
        for (std::size_t i = c + 1; i < n; ++i)
        {
            const double f = M[i][c] / M[c][c];
            for (std::size_t j = c; j < n; ++j)
                M[i][j] -= f * M[c][j];
            r[i] -= f * r[c];
        }
    }
    y.assign(n, 0.0);
    for (std::size_t c = n; c-- > 0;)
    {
        double s = r[c];
        for (std::size_t j = c + 1; j < n; ++j)
            s -= M[c][j] * y[j];
        y[c] = s / M[c][c];
    }
    return true;
}

// Projection onto {y : Ay <= b} by enumerating active sets: for each subset
// S with independent rows, y = x - A_Sᵀ mu with A_S y = b_S; keep the KKT point.
Vector brute_force_projection(const Vector& x, const DenseMatrix& A, const Vector& b)
{
    const std::size_t m = A.rows(), n = A.cols();
    Vector best;
    double best_dist = INFINITY;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask)
    {
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (std::size_t{1} << i))
                S.push_back(i);
        if (S.size() > n)
            continue;
        Vector mu;
        if (!S.empty())
        {
            std::vector<std::vector<double>> M(S.size(), std::vector<double>(S.size()));
            Vector r(S.size());
            for (std::size_t p = 0; p < S.size(); ++p)
            {
                for (std::size_t q = 0; q < S.size(); ++q)
                {
                    double s = 0;
                    for (std::size_t j = 0; j < n; ++j)
                        s += A(S[p], j) * A(S[q], j);
                    M[p][q] = s;
                }
                double ax = 0;
                for (std::size_t j = 0; j < n; ++j)
                    ax += A(S[p], j) * x[j];
                r[p] = ax - b[S[p]];
            }
            if (!solve_dense(M, r, mu))
                continue;
            bool dual_ok = true;
            for (double v : mu)
                dual_ok = dual_ok && v >= -1e-12;
            if (!dual_ok)
                continue;
        }
        Vector y = x;
        for (std::size_t p = 0; p < S.size(); ++p)
            for (std::size_t j = 0; j < n; ++j)
                y[j] -= mu[p] * A(S[p], j);
        bool feasible = true;
        for (std::size_t i = 0; i < m; ++i)
        {
            double ay = 0;
            for (std::size_t j = 0; j < n; ++j)
                ay += A(i, j) * y[j];
            feasible = feasible && ay - b[i] <= 1e-10;
        }
        double d = 0;
        for (std::size_t j = 0; j < n; ++j)
            d += (y[j] - x[j]) * (y[j] - x[j]);
        if (feasible && d < best_dist)
        {
            best_dist = d;
            best = y;
        }
    }
    return best;
}

Problem halfspaces(std::initializer_list<std::initializer_list<double>> rows, Vector b)
{
    return Problem(DenseMatrix::from_rows(rows), std::move(b), ProblemKind::LF);
}

}  // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("rate constants")
    {
        CHECK(rate_constants(Method::RPK, ProblemKind::LS, 1, 1, 2).per_step_factor == doctest::Approx(0.625));
        CHECK(rate_constants(Method::RAK, ProblemKind::LS, 1, 1, 2).per_step_factor == doctest::Approx(0.75));
        CHECK(rate_constants(Method::RPK, ProblemKind::LS, 1e12, 1, 2).per_step_factor ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rate_constants(Method::RK, ProblemKind::LS, 1, 1, 2).per_step_factor == 0.5);
        // LF: 1 - g/(m L^2)
        CHECK(rate_constants(Method::RPK, ProblemKind::LF, 1, 2, 3).per_step_factor ==
              doctest::Approx(1 - 0.75 / 12));
        CHECK(rate_constants(Method::RAK, ProblemKind::LF, 3, 1, 4).per_step_factor ==
              doctest::Approx(1 - 0.75 / 4));

        CHECK_THROWS_AS(rate_constants(Method::RPK, ProblemKind::LS, 0, 1, 2), InvalidInput);
        CHECK_THROWS_AS(rate_constants(Method::RPK, ProblemKind::LS, 1, 0, 2), InvalidInput);
        CHECK_THROWS_AS(rate_constants(Method::RPK, ProblemKind::LS, 1, 1, 0), InvalidInput);
    }

    TEST_CASE("rate constants are monotone and RPK is never slower than RAK")
    {
        double prev_rpk = 1.0, prev_rak = 1.0;
        for (int e = -60; e <= 60; ++e)
        {
            const double rho = std::pow(10.0, e / 10.0);
            const double rpk = rate_constants(Method::RPK, ProblemKind::LS, rho, 1.0, 3).per_step_factor;
            const double rak = rate_constants(Method::RAK, ProblemKind::LS, rho, 1.0, 3).per_step_factor;
            CHECK(rpk <= prev_rpk);
            CHECK(rak <= prev_rak);
            CHECK(rpk <= rak);
            CHECK(rpk >= 0.0);
            prev_rpk = rpk;
            prev_rak = rak;
        }
    }

    TEST_CASE("LS Lyapunov function")
    {
        const Vector xs{1, -1};
        CHECK(lyapunov_ls(xs, 0, 1, xs).value == 0);
        const LyapunovValue v = lyapunov_ls(Vector{1, 0}, 2, 4, Vector{0, 0});
        CHECK(v.value == 2);
        CHECK(v.error_part == 1);
        CHECK(v.dual_part == 1);
        CHECK(lyapunov_ls(xs, 6, 3, xs).dual_part == lyapunov_ls(xs, 12, 12, xs).dual_part);
    }

    TEST_CASE("LF Lyapunov function")
    {
        const Problem p = halfspaces({{1, 0}}, {0});
        CHECK(lyapunov_lf(Vector{-1, 5}, 0, 1, p).value == 0);
        CHECK(lyapunov_lf(Vector{2, 0}, 0, 1, p).value == doctest::Approx(4));
        CHECK(lyapunov_lf(Vector{-1, 0}, 3, 9, p).value == doctest::Approx(1));
    }

    TEST_CASE("affine projection")
    {
        const DenseMatrix A = DenseMatrix::from_rows({{1, 0}});
        CHECK(project_affine(Vector{1, 4}, A, Vector{1}) == Vector{1, 4});
        const Vector y = project_affine(Vector{3, 7}, A, Vector{1});
        CHECK(y[0] == doctest::Approx(1));
        CHECK(y[1] == doctest::Approx(7));

        test::Gen gen(51);
        for (int t = 0; t < 20; ++t)
        {
            const DenseMatrix a = gen.matrix(1, 4);
            const Vector b{gen.normal()};
            const Vector x = gen.vector(4);
            CHECK(test::max_abs_diff(project_affine(x, a, b), rk_step_ls(x, a, b, 0)) <= 1e-12);
        }
    }

    TEST_CASE("polyhedron projection examples")
    {
        const DenseMatrix A1 = DenseMatrix::from_rows({{1, 0}});
        CHECK(test::max_abs_diff(project_polyhedron(Vector{0.5, 3}, A1, Vector{1}).point, {0.5, 3}) <= 1e-12);
        CHECK(test::max_abs_diff(project_polyhedron(Vector{2, 0}, A1, Vector{1}).point, {1, 0}) <= 1e-12);
        const PolyhedronProjection corner =
            project_polyhedron(Vector{1, 1}, DenseMatrix::identity(2), Vector{0, 0});
        CHECK(test::max_abs_diff(corner.point, {0, 0}) <= 1e-12);
        CHECK(corner.multipliers[0] >= 0);
        CHECK(corner.multipliers[1] >= 0);
    }

    TEST_CASE("polyhedron projection matches active-set enumeration")
    {
        test::Gen gen(53);
        for (int t = 0; t < 60; ++t)
        {
            const std::size_t n = gen.index(2, 4);
            const std::size_t m = gen.index(1, 7);
            const Problem p = generate_feasible_lf(m, n, 1000 + t, gen.uniform(0, 1));
            const Vector x = gen.vector(n, 3.0);
            const PolyhedronProjection proj = project_polyhedron(x, p.A(), p.b());
            const Vector oracle = brute_force_projection(x, p.A(), p.b());
            INFO("case " << t);
            REQUIRE(!oracle.empty());
            CHECK(test::max_abs_diff(proj.point, oracle) <= 1e-9);
            for (double mu : proj.multipliers)
                CHECK(mu >= 0.0);
            CHECK(proj.complementarity <= 1e-8);
        }
    }

    TEST_CASE("projection is feasible and idempotent")
    {
        test::Gen gen(57);
        for (int t = 0; t < 100; ++t)
        {
            const Problem p = normalize_rows(generate_feasible_lf(20, 10, 2000 + t, gen.uniform(0, 1)));
            Vector x = gen.vector(10, 2.0);
            for (std::size_t j = 0; j < 10; ++j)
                x[j] += (*p.planted())[j];
            const PolyhedronProjection a = project_polyhedron(x, p.A(), p.b());
            CHECK(a.max_violation <= 1e-8 * (1 + norm_inf(p.b())));
            const PolyhedronProjection b = project_polyhedron(a.point, p.A(), p.b());
            CHECK(norm2(subtract(a.point, b.point)) <= 2 * kProjectionTol);
        }
    }

    TEST_CASE("projection failure is reported")
    {
        // infeasible system: x1 <= -1 and -x1 <= -1
        CHECK_THROWS_AS(project_polyhedron(Vector{0}, DenseMatrix::from_rows({{1}, {-1}}), Vector{-1, -1}),
                        InconsistentSystem);
        // iteration cap
        CHECK_THROWS_AS(project_polyhedron(Vector{5, 5}, DenseMatrix::identity(2), Vector{0, 0}, kProjectionTol, 0),
                        ConvergenceFailure);
        // a feasible start needs no iterations
        const PolyhedronProjection inside =
            project_polyhedron(Vector{-1, -1}, DenseMatrix::identity(2), Vector{0, 0}, kProjectionTol, 0);
        CHECK(inside.point == Vector{-1, -1});
        CHECK(inside.iterations == 0);
    }

    TEST_CASE("distance to the feasible region")
    {
        const Problem p = halfspaces({{1, 0}}, {0});
        CHECK(distance_to_feasible(Vector{-3, 1}, p) <= 1e-8);
        CHECK(distance_to_feasible(Vector{2, 0}, p) == doctest::Approx(2));
        CHECK_THROWS_AS(distance_to_feasible(Vector{0, 0}, generate_consistent_ls(3, 2, 1)), InvalidInput);

        test::Gen gen(59);
        const Problem q = generate_feasible_lf(15, 5, 3, 0.5);
        for (int t = 0; t < 50; ++t)
        {
            const Vector x = gen.vector(5, 3.0);
            CHECK(distance_to_feasible(x, q) <= norm2(subtract(x, *q.planted())) + 1e-12);
        }
    }

    TEST_CASE("Hoffman estimate")
    {
        test::Gen gen(61);
        for (int t = 0; t < 5; ++t)
        {
            Vector a = gen.vector(3);
            const double len = norm2(a);
            for (double& e : a)
                e /= len;
            const Vector planted = gen.vector(3);
            const Problem p(DenseMatrix(1, 3, a), Vector{dot(a, planted)}, ProblemKind::LF, planted, true);
            const HoffmanEstimate est = hoffman_estimate(p, 100, 1.0, t);
            CHECK(std::abs(est.L_hat - 1.0) <= 1e-8);
            CHECK(est.contributing > 0);
        }

        // strictly interior witness with a tiny ball: every sample is feasible
        const Problem interior = generate_feasible_lf(10, 3, 4, 0.0);
        CHECK_THROWS_AS(hoffman_estimate(interior, 50, 1e-6, 1), NoEstimate);

        const Problem q = generate_feasible_lf(12, 4, 5, 0.5);
        double prev = 0.0;
        for (std::size_t n : {1, 10, 50, 200})
        {
            const double L = hoffman_estimate(q, n, 1.0, 7).L_hat;
            CHECK(L >= prev);
            prev = L;
        }
    }

    TEST_CASE("exact expectation on the identity")
    {
        const Problem p(DenseMatrix::identity(2), Vector{0, 0}, ProblemKind::LS, Vector{0, 0}, true);
        const Vector x{1, 1}, xs{0, 0};
        const ExpectationReport rpk = exact_expected_step(p, x, 0, Method::RPK, 1, xs);
        CHECK(rpk.expected_error == doctest::Approx(1.25));
        CHECK(rpk.current_error == 2);
        CHECK(rpk.expected_error == doctest::Approx(0.625 * 2).epsilon(1e-12));

        const ExpectationReport rak = exact_expected_step(p, x, 0, Method::RAK, 1, xs);
        CHECK(rak.expected_lyapunov == doctest::Approx(1.5));
        CHECK(rak.expected_lyapunov == doctest::Approx(0.75 * 2).epsilon(1e-12));

        const ExpectationReport fixed = exact_expected_step(p, xs, 0, Method::RAK, 1, xs);
        CHECK(fixed.expected_error == 0);
        CHECK(fixed.expected_lyapunov == 0);

        CHECK_THROWS_AS(exact_expected_step(p, x, 0, Method::RPK, 1), InvalidInput);
    }

    TEST_CASE("exact expectation agrees with the per-row closed form")
    {
        // unit rows: E||x'-x*||^2 = ||e||^2 - g(rho) * sum_i p_i r_i^2
        test::Gen gen(67);
        for (int t = 0; t < 20; ++t)
        {
            const Problem p = normalize_rows(generate_consistent_ls(12, 5, 300 + t));
            const Vector& xs = *p.planted();
            const Vector x = gen.vector(5, 2.0);
            const double rho = std::pow(10.0, gen.uniform(-1, 1));
            double mean_r2 = 0.0;
            for (std::size_t i = 0; i < 12; ++i)
                mean_r2 += std::pow(row_dot(p.A(), i, x) - p.b()[i], 2) / 12.0;
            const double e2 = norm2_sq(subtract(x, xs));
            const double g = rho * (rho + 2) / ((1 + rho) * (1 + rho));
            const ExpectationReport r = exact_expected_step(p, x, 0, Method::RPK, rho, xs);
            CHECK(test::rel_err(r.expected_error, e2 - g * mean_r2) <= 1e-12);
            const ExpectationReport rk = exact_expected_step(p, x, 0, Method::RK, rho, xs);
            CHECK(test::rel_err(rk.expected_error, e2 - mean_r2) <= 1e-12);
        }
    }

    TEST_CASE("adaptive report reduces to the fixed-penalty inequality")
    {
        test::Gen gen(71);
        const Problem p = normalize_rows(generate_consistent_ls(20, 10, 8));
        const Vector& xs = *p.planted();
        const double lambda = lambda_min_variants(p.A()).lambda_min;
        for (int t = 0; t < 20; ++t)
        {
            const Vector x = gen.vector(10);
            const double z = gen.uniform(-5, 5);
            const double rho = std::pow(10.0, gen.uniform(-1, 1));

            const AdaptiveStepReport one = adaptive_step_report(p, x, z, rho, 1.0, xs);
            const ExpectationReport e = exact_expected_step(p, x, z, Method::RAK, rho, xs);
            CHECK(test::rel_err(one.lhs, e.expected_lyapunov) <= 1e-12);
            CHECK(one.rhs <= rate_constants(Method::RAK, ProblemKind::LS, rho, lambda, 20).per_step_factor *
                                     e.current_lyapunov +
                                 1e-10);
            CHECK(one.slack >= -1e-10);

            const AdaptiveStepReport two = adaptive_step_report(p, x, z, rho, 2.0, xs);
            CHECK(two.slack >= -1e-10);

            const AdaptiveStepReport at_zero = adaptive_step_report(p, x, 0.0, rho, 1.0, xs);
            const AdaptiveStepReport at_zero_c = adaptive_step_report(p, x, 0.0, rho, 3.0, xs);
            CHECK(at_zero.rhs - at_zero_c.rhs ==
                  doctest::Approx((2.0 / 3.0) / rho * at_zero_c.expected_z_sq).epsilon(1e-9));
        }
        CHECK_THROWS_AS(adaptive_step_report(generate_consistent_ls(4, 2, 1), Vector{0, 0}, 0, 1, 1,
                                             *generate_consistent_ls(4, 2, 1).planted()),
                        InvalidInput);
    }

    TEST_CASE("Monte Carlo curve basics")
    {
        const Problem p = normalize_rows(generate_consistent_ls(10, 5, 12));
        SolverConfig cfg;
        cfg.method = Method::RPK;
        const std::size_t zero[] = {0};
        const CurveReport c0 = monte_carlo_error_curve(p, cfg, 1, zero);
        const Vector xs = least_norm_solution(p.A(), p.b(), Vector(5, 0.0));
        CHECK(c0.mean_error[0] == doctest::Approx(norm2_sq(xs)));

        const std::size_t cps[] = {100, 10, 0, 50, 10};
        for (Method m : {Method::RK, Method::RPK})
        {
            cfg.method = m;
            const CurveReport c = monte_carlo_error_curve(p, cfg, 30, cps);
            CHECK(c.checkpoints == std::vector<std::size_t>{0, 10, 50, 100});
            for (std::size_t k = 1; k < c.checkpoints.size(); ++k)
                CHECK(c.mean_error[k] <= c.mean_error[k - 1]);
        }
        CHECK_THROWS_AS(monte_carlo_error_curve(p, cfg, 0, cps), InvalidInput);
    }

    TEST_CASE("single-trial curve matches a solver run")
    {
        const Problem p = normalize_rows(generate_consistent_ls(10, 5, 13));
        SolverConfig cfg;
        cfg.method = Method::RAK;
        cfg.seed = 77;
        cfg.max_iters = 60;
        const std::size_t cps[] = {20, 60};
        const CurveReport c = monte_carlo_error_curve(p, cfg, 1, cps);
        const Vector xs = least_norm_solution(p.A(), p.b(), Vector(5, 0.0));
        std::vector<double> seen;
        run_solver(p, cfg, [&](const IterationView& v) {
            if (v.k == 20 || v.k == 60)
                seen.push_back(lyapunov_ls(v.state.x, v.state.z, v.state.rho, xs).value);
        });
        CHECK(c.mean_lyapunov[0] == seen[0]);
        CHECK(c.mean_lyapunov[1] == seen[1]);
    }
}
