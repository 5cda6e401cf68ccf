#include <doctest.h>

#include <cmath>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/problem.hpp"
#include "kaczmarz/solvers.hpp"
#include "support.hpp"

using namespace kaczmarz;

namespace {

const DenseMatrix kE1 = DenseMatrix::from_rows({{1, 0}});

void check_vec(const Vector& got, const Vector& want, double tol = 1e-15)
{
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) <= tol);
}

}  // namespace

TEST_SUITE("solvers")
{
    TEST_CASE("method names")
    {
        CHECK(to_string(Method::RAK) == "rak");
        CHECK(parse_method("rpk") == Method::RPK);
        CHECK_THROWS_AS(parse_method("sgd"), InvalidInput);
    }

    TEST_CASE("RK LS step")
    {
        check_vec(rk_step_ls(Vector{2, 5}, DenseMatrix::from_rows({{0, 1}}), Vector{3}, 0), {2, 3});
        check_vec(rk_step_ls(Vector{0, 0}, DenseMatrix::from_rows({{2, 0}}), Vector{2}, 0), {1, 0});
        check_vec(rk_step_ls(Vector{4, 1}, kE1, Vector{4}, 0), {4, 1}, 0.0);
        CHECK_THROWS_AS(rk_step_ls(Vector{0, 0}, kE1, Vector{4}, 1), InvalidInput);
        CHECK_THROWS_AS(rk_step_ls(Vector{0}, kE1, Vector{4}, 0), InvalidInput);
    }

    TEST_CASE("RK LF step")
    {
        check_vec(rk_step_lf(Vector{3, 0}, kE1, Vector{1}, 0), {1, 0});
        check_vec(rk_step_lf(Vector{0, 7}, kE1, Vector{1}, 0), {0, 7}, 0.0);
        check_vec(rk_step_lf(Vector{1, 7}, kE1, Vector{1}, 0), {1, 7}, 0.0);
    }

    TEST_CASE("RPK steps")
    {
        check_vec(rpk_step_ls(Vector{1, 2}, kE1, Vector{0}, 0, 1.0), {0.5, 2});
        check_vec(rpk_step_ls(Vector{0, 2}, kE1, Vector{0}, 0, 1.0), {0, 2}, 0.0);
        check_vec(rpk_step_lf(Vector{2, 0}, kE1, Vector{0}, 0, 3.0), {0.5, 0});
        check_vec(rpk_step_lf(Vector{-1, 4}, kE1, Vector{0}, 0, 3.0), {-1, 4}, 0.0);
        CHECK_THROWS_AS(rpk_step_ls(Vector{1, 2}, kE1, Vector{0}, 0, 0.0), InvalidInput);
        CHECK_THROWS_AS(rpk_step_lf(Vector{1, 2}, kE1, Vector{0}, 0, -1.0), InvalidInput);
    }

    TEST_CASE("RAK LS step")
    {
        RakStep s = rak_step_ls(Vector{1, 2}, 0.0, kE1, Vector{0}, 0, 1.0);
        check_vec(s.x, {0.5, 2});
        CHECK(s.z == doctest::Approx(0.5));
        CHECK(0.0 + 1.0 * (row_dot(kE1, 0, s.x) - 0.0) == doctest::Approx(0.5));

        s = rak_step_ls(Vector{0, 2}, 0.0, kE1, Vector{0}, 0, 1.0);
        check_vec(s.x, {0, 2}, 0.0);
        CHECK(s.z == 0.0);

        s = rak_step_ls(Vector{1, 2}, 1.0, kE1, Vector{0}, 0, 1.0);
        CHECK(s.z == doctest::Approx(1.0));
        check_vec(s.x, {0, 2});
        CHECK_THROWS_AS(rak_step_ls(Vector{1, 2}, 1.0, kE1, Vector{0}, 0, 0.0), InvalidInput);
    }

    TEST_CASE("RAK LF step")
    {
        RakStep s = rak_step_lf(Vector{-1, 3}, 0.0, kE1, Vector{0}, 0, 1.0);
        check_vec(s.x, {-1, 3}, 0.0);
        CHECK(s.z == 0.0);

        s = rak_step_lf(Vector{1, 2}, 0.0, kE1, Vector{0}, 0, 1.0);
        check_vec(s.x, {0.5, 2});
        CHECK(s.z == doctest::Approx(0.5));

        // the carried multiplier moves an iterate that satisfies the row
        s = rak_step_lf(Vector{0, 0}, 2.0, kE1, Vector{1}, 0, 1.0);
        CHECK(s.z == doctest::Approx(0.5));
        check_vec(s.x, {-0.5, 0});

        CHECK_THROWS_AS(rak_step_lf(Vector{0, 0}, -0.1, kE1, Vector{1}, 0, 1.0), InvalidInput);
        CHECK_THROWS_AS(rak_step_lf(Vector{0, 0}, 0.0, kE1, Vector{1}, 0, 0.0), InvalidInput);
    }

    TEST_CASE("apply_step dispatch")
    {
        const Vector x{1, 2};
        CHECK(apply_step(Method::RK, ProblemKind::LS, x, 5.0, kE1, Vector{0}, 0, 1.0).x == rk_step_ls(x, kE1, Vector{0}, 0));
        CHECK(apply_step(Method::RK, ProblemKind::LS, x, 5.0, kE1, Vector{0}, 0, 1.0).z == 5.0);
        CHECK(apply_step(Method::RPK, ProblemKind::LF, x, 0.0, kE1, Vector{0}, 0, 2.0).x ==
              rpk_step_lf(x, kE1, Vector{0}, 0, 2.0));
        const RakStep direct = rak_step_lf(x, 0.5, kE1, Vector{0}, 0, 2.0);
        const RakStep via = apply_step(Method::RAK, ProblemKind::LF, x, 0.5, kE1, Vector{0}, 0, 2.0);
        CHECK(via.x == direct.x);
        CHECK(via.z == direct.z);
    }

    TEST_CASE("penalty schedule")
    {
        CHECK(advance_rho(1.0, 2.0, 1e12) == 2.0);
        CHECK(advance_rho(0.37, 1.0, 1e12) == 0.37);
        CHECK(advance_rho(1e12, 2.0, 1e12) == 1e12);

        SolverConfig cfg;
        cfg.rho0 = 0.5;
        cfg.c = 3.0;
        CHECK(rho_at(cfg, 0) == 0.5);
        CHECK(rho_at(cfg, 4) == 0.5 * 81);
        CHECK(rho_at(cfg, 1000) == cfg.rho_max);

        cfg.c = 0.5;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
        cfg.c = 1.0;
        cfg.rho0 = 0.0;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
        cfg.rho0 = 10.0;
        cfg.rho_max = 5.0;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    }

    TEST_CASE("zero iterations return the initial state")
    {
        const Problem p = generate_consistent_ls(5, 3, 1);
        SolverConfig cfg;
        cfg.method = Method::RPK;
        std::size_t calls = 0;
        const SolverState s = run_solver(p, cfg, [&](const IterationView& v) {
            ++calls;
            CHECK(v.k == 0);
            CHECK(v.row == -1);
        });
        CHECK(calls == 1);
        CHECK(s.k == 0);
        CHECK(s.x == Vector(3, 0.0));
        CHECK(s.z == 0.0);
    }

    TEST_CASE("RK on the identity finishes one coordinate per row")
    {
        const Problem p(DenseMatrix::identity(2), Vector{1, 1}, ProblemKind::LS);
        SolverConfig cfg;
        cfg.max_iters = 50;
        cfg.seed = 3;
        bool seen[2] = {false, false};
        run_solver(p, cfg, [&](const IterationView& v) {
            if (v.row >= 0)
                seen[v.row] = true;
            if (seen[0] && seen[1])
                CHECK(v.state.x == Vector{1, 1});
        });
        CHECK((seen[0] && seen[1]));
    }

    TEST_CASE("residual tolerance stops early")
    {
        const Problem p(DenseMatrix::identity(2), Vector{1, -2}, ProblemKind::LS);
        SolverConfig cfg;
        cfg.max_iters = 1000;
        cfg.residual_tol = 1e-8;
        const SolverState s = run_solver(p, cfg);
        CHECK(s.k < 1000);
        CHECK(residual_norm(p, s.x) <= 1e-8);
    }

    TEST_CASE("runs are deterministic and the schedule is exact")
    {
        const Problem p = generate_feasible_lf(12, 4, 2, 0.5);
        SolverConfig cfg;
        cfg.method = Method::RAK;
        cfg.rho0 = 0.25;
        cfg.c = 1.5;
        cfg.max_iters = 200;
        cfg.seed = 99;
        std::vector<double> xs1, xs2;
        std::vector<std::ptrdiff_t> rows1, rows2;
        auto collect = [](std::vector<double>& xs, std::vector<std::ptrdiff_t>& rows) {
            return [&](const IterationView& v) {
                xs.insert(xs.end(), v.state.x.begin(), v.state.x.end());
                xs.push_back(v.state.z);
                xs.push_back(v.state.rho);
                rows.push_back(v.row);
            };
        };
        run_solver(p, cfg, collect(xs1, rows1));
        run_solver(p, cfg, collect(xs2, rows2));
        CHECK(xs1 == xs2);
        CHECK(rows1 == rows2);

        run_solver(p, cfg, [&](const IterationView& v) {
            CHECK(v.state.rho == std::min(cfg.rho0 * std::pow(cfg.c, double(v.k)), cfg.rho_max));
            CHECK(v.state.z >= 0.0);
        });
    }

    TEST_CASE("per-row multiplier mode")
    {
        const Problem p = generate_consistent_ls(6, 3, 4);
        SolverConfig cfg;
        cfg.method = Method::RAK;
        cfg.multiplier_mode = MultiplierMode::PerRow;
        cfg.max_iters = 300;
        const SolverState s = run_solver(p, cfg);
        CHECK(s.row_multipliers.size() == 6);

        cfg.multiplier_mode = MultiplierMode::Scalar;
        CHECK(run_solver(p, cfg).row_multipliers.empty());
    }

    TEST_CASE("normalize flag runs on unit rows")
    {
        const Problem p = generate_consistent_ls(6, 3, 4);
        SolverConfig cfg;
        cfg.method = Method::RPK;
        cfg.max_iters = 40;
        cfg.normalize = true;
        const SolverState a = run_solver(p, cfg);
        cfg.normalize = false;
        const SolverState b = run_solver(normalize_rows(p), cfg);
        CHECK(a.x == b.x);
        CHECK(effective_problem(p, cfg).normalized() == false);
        cfg.normalize = true;
        CHECK(effective_problem(p, cfg).normalized());
    }

    TEST_CASE("custom start and validation")
    {
        const Problem p = generate_consistent_ls(4, 3, 4);
        SolverConfig cfg;
        cfg.x0 = Vector{1, 2, 3};
        CHECK(run_solver(p, cfg).x == Vector{1, 2, 3});
        cfg.x0 = Vector{1, 2};
        CHECK_THROWS_AS(run_solver(p, cfg), InvalidInput);
    }

    TEST_CASE("non-finite iterate raises with the iteration index")
    {
        const Problem p(DenseMatrix::from_rows({{1e-160}}), Vector{1e160}, ProblemKind::LS);
        SolverConfig cfg;
        cfg.max_iters = 5;
        try
        {
            run_solver(p, cfg);
            FAIL("expected NumericFailure");
        }
        catch (const NumericFailure& e)
        {
            CHECK(e.iteration() == 1);
        }
    }

    TEST_CASE("residual norms")
    {
        const Problem ls(DenseMatrix::identity(2), Vector{1, 1}, ProblemKind::LS);
        CHECK(residual_norm(ls, Vector{0, 3}) == 2);
        const Problem lf(DenseMatrix::identity(2), Vector{1, 1}, ProblemKind::LF);
        CHECK(residual_norm(lf, Vector{0, -3}) == 0);
        CHECK(residual_norm(lf, Vector{1.5, -3}) == 0.5);
    }
}
