#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sdkrylov/analysis.hpp"
#include "sdkrylov/minres.hpp"
#include "sdkrylov/problems.hpp"
#include "sdkrylov/selfdual.hpp"

using namespace sdkrylov;
using Catch::Approx;

namespace {

SolveConfig config(double tol, index_t maxit,
                   ResidualReference ref = ResidualReference::TransformedSystem) {
    SolveConfig cfg;
    cfg.tol = tol;
    cfg.max_iterations = maxit;
    cfg.residual_reference = ref;
    return cfg;
}

SparseMatrix random_pd(index_t n, std::uint64_t seed, double skew = 1.0) {
    SplitMix64 rng(seed);
    DenseMatrix m(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i; j < n; ++j) {
            const double v = rng.next_symmetric();
            m(i, j) += v;
            m(j, i) += v;
        }
    for (index_t i = 0; i < n; ++i) m(i, i) += static_cast<double>(n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j) {
            const double v = skew * rng.next_symmetric();
            m(i, j) += v;
            m(j, i) -= v;
        }
    return SparseMatrix::from_dense(m);
}

DenseVector random_vec(index_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DenseVector v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.next_symmetric();
    return v;
}

DenseMatrix operator_to_dense(const LinearOperator& op) {
    const index_t n = op.dimension;
    DenseMatrix out(n, n);
    DenseVector e(static_cast<std::size_t>(n), 0.0);
    for (index_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const DenseVector col = op.apply(e);
        for (index_t i = 0; i < n; ++i) out(i, j) = col[i];
        e[j] = 0.0;
    }
    return out;
}

}  // namespace

TEST_CASE("build_selfdual_system") {
    SECTION("normal equations give A^T A") {
        const SparseMatrix a = random_pd(6, 17);
        const auto sys = build_selfdual_system(a, random_vec(6, 18),
                                               PreconditionerSpec::normal_equations());
        const DenseMatrix lhs = operator_to_dense(sys.op);
        const DenseMatrix ref = a.to_dense().transposed().multiply(a.to_dense());
        for (index_t i = 0; i < 6; ++i)
            for (index_t j = 0; j < 6; ++j)
                REQUIRE(lhs(i, j) == Approx(ref(i, j)).margin(1e-12));
        const DenseVector atb = a.apply(random_vec(6, 18), true);
        for (index_t i = 0; i < 6; ++i) REQUIRE(sys.rhs[i] == Approx(atb[i]).margin(1e-12));
    }
    SECTION("self-dual operator of the ill-conditioned 2x2 family") {
        const double eps = 0.3;
        const SparseMatrix a = example22_lower(eps);
        const auto sys =
            build_selfdual_system(a, {0.0, eps}, PreconditionerSpec::self_dual());
        const DenseMatrix lhs = operator_to_dense(sys.op);
        REQUIRE(lhs(0, 0) == Approx(eps / (eps - 1.0)).margin(1e-14));
        REQUIRE(lhs(1, 1) == Approx(eps).margin(1e-14));
        REQUIRE(lhs(0, 1) == Approx(0.0).margin(1e-14));
        REQUIRE(lhs(1, 0) == Approx(0.0).margin(1e-14));
    }
    SECTION("self-dual operator matches the dense chain on a random system") {
        const SparseMatrix a = random_pd(10, 5);
        const auto sys = build_selfdual_system(a, random_vec(10, 6),
                                               PreconditionerSpec::self_dual());
        const SymmetricSplit sp = split(a);
        const DenseLu lu(sp.s.to_dense());
        const DenseVector x = random_vec(10, 7);
        const DenseVector chain = a.apply(lu.solve(a.apply(x)), true);
        const DenseVector opx = sys.op.apply(x);
        double scale = 0.0;
        for (double v : chain) scale = std::max(scale, std::abs(v));
        for (index_t i = 0; i < 10; ++i)
            REQUIRE(opx[i] == Approx(chain[i]).margin(1e-11 * scale));
    }
    SECTION("every SPD spec yields a symmetric positive operator") {
        const SparseMatrix a = random_pd(8, 40);
        const DenseVector b = random_vec(8, 41);
        const std::vector<PreconditionerSpec> specs = {
            PreconditionerSpec::self_dual(),
            PreconditionerSpec::normal_equations(),
            PreconditionerSpec::resolvent_alpha(0.5),
            PreconditionerSpec::resolvent_beta(0.5),
            PreconditionerSpec::combined(0.5, 0.25),
            PreconditionerSpec::shifted_inverse(0.5),
            PreconditionerSpec::shifted_inverse_minus(0.5, 0.1),
        };
        SplitMix64 rng(42);
        for (const auto& spec : specs) {
            const auto sys = build_selfdual_system(a, b, spec);
            REQUIRE(probe_symmetric(sys.op));
            for (int t = 0; t < 16; ++t) {
                DenseVector x = random_vec(8, rng.next_u64());
                REQUIRE(dot(sys.op.apply(x), x) > 0.0);
            }
        }
    }
    SECTION("resolvent alpha refuses an indefinite inner matrix") {
        // A_s indefinite and alpha = 1 makes alpha A_s + (1-alpha) I = A_s
        const SparseMatrix a = example22_lower(0.5);
        REQUIRE_THROWS_AS(
            build_selfdual_system(a, {1.0, 1.0}, PreconditionerSpec::resolvent_alpha(1.0)),
            NotPositiveDefiniteError);
    }
    SECTION("inexact inner mode approaches the exact operator") {
        const SparseMatrix a = random_pd(8, 50);
        const DenseVector b = random_vec(8, 51);
        const auto exact = build_selfdual_system(a, b, PreconditionerSpec::self_dual());
        const auto inexact = build_selfdual_system(a, b, PreconditionerSpec::self_dual(),
                                                   InnerMode::inexact(1e-12));
        const DenseVector x = random_vec(8, 52);
        const DenseVector ye = exact.op.apply(x);
        const DenseVector yi = inexact.op.apply(x);
        for (index_t i = 0; i < 8; ++i) REQUIRE(yi[i] == Approx(ye[i]).epsilon(1e-8));
        REQUIRE(inexact.counters->inner_iterations.load() > 0);
    }
}

TEST_CASE("esd_cgn") {
    SECTION("reproduces the published 1D benchmark counts") {
        struct Cell { double eps; double iters; };
        for (const Cell cell : {Cell{1e-16, 2}, Cell{1e-3, 8}}) {
            const auto sys = gen_ode1d(cell.eps, 64, SolutionChoice::x_sin_pi_x());
            const auto rep = esd_cgn(sys.a, sys.b, DenseVector(64, 0.0),
                                     config(1e-6, 500, ResidualReference::OriginalSystem));
            REQUIRE(rep.status == SolveStatus::Converged);
            REQUIRE(rep.iterations == cell.iters);
            REQUIRE(rep.inner_solve_count == static_cast<std::size_t>(rep.iterations) + 2);
        }
        const auto sys = gen_ode1d(1e-3, 128, SolutionChoice::x_one_minus_x_over_cos_x());
        const auto rep = esd_cgn(sys.a, sys.b, DenseVector(128, 0.0),
                                 config(1e-6, 500, ResidualReference::OriginalSystem));
        REQUIRE(rep.iterations == 11.0);
    }
    SECTION("reduces to plain CG when the matrix is symmetric") {
        const SparseMatrix a = random_pd(12, 60, 0.0);
        const DenseVector b = random_vec(12, 61);
        const auto sd = esd_cgn(a, b, DenseVector(12, 0.0), config(1e-10, 100));
        const auto plain = cg(LinearOperator::from_matrix(a, true, true), b,
                              DenseVector(12, 0.0), config(1e-10, 100));
        REQUIRE(sd.iterations == plain.iterations);
        REQUIRE(sd.residual_history.size() == plain.residual_history.size());
        for (std::size_t i = 0; i < sd.residual_history.size(); ++i)
            REQUIRE(sd.residual_history[i] ==
                    Approx(plain.residual_history[i]).epsilon(1e-12).margin(1e-300));
    }
    SECTION("solves to oracle accuracy at tight tolerance") {
        const SparseMatrix a = random_pd(12, 70);
        const DenseVector b = random_vec(12, 71);
        const auto rep = esd_cgn(a, b, DenseVector(12, 0.0), config(1e-12, 500));
        const DenseVector oracle = dense_solve_oracle(a.to_dense(), b);
        double num = 0, den = 0;
        for (index_t i = 0; i < 12; ++i) {
            num += (rep.solution[i] - oracle[i]) * (rep.solution[i] - oracle[i]);
            den += oracle[i] * oracle[i];
        }
        REQUIRE(std::sqrt(num / den) <= 1e-8);
    }
    SECTION("rejects a non positive definite matrix") {
        const SparseMatrix a = example22_lower(0.5);
        REQUIRE_THROWS_AS(esd_cgn(a, {1.0, 1.0}, DenseVector(2, 0.0), config(1e-6, 10)),
                          NotPositiveDefiniteError);
    }
    SECTION("zero-gap certificate at convergence") {
        const SparseMatrix a = random_pd(10, 80);
        const DenseVector b = random_vec(10, 81);
        const double tol = 1e-8;
        const auto rep = esd_cgn(a, b, DenseVector(10, 0.0), config(tol, 500));
        REQUIRE(rep.status == SolveStatus::Converged);
        const auto gap = functional(a, b, rep.solution);
        const SpdFactorization f(split(a).s);
        const double scale = dot(f.solve(b), b);
        REQUIRE(gap.value <= tol * tol * scale);
    }
}

TEST_CASE("isd_cgn") {
    SECTION("published counts within the inexactness allowance") {
        const auto s64 = gen_ode1d(1e-2, 64, SolutionChoice::x_sin_pi_x());
        const auto r64 = isd_cgn(s64.a, s64.b, DenseVector(64, 0.0), 1e-7,
                                 config(1e-6, 500, ResidualReference::OriginalSystem));
        REQUIRE(r64.status == SolveStatus::Converged);
        REQUIRE(std::abs(r64.iterations - 24.0) <= 2.0);
        REQUIRE(r64.inner_iteration_count > 0);
        const auto s128 = gen_ode1d(1e-4, 128, SolutionChoice::x_one_minus_x_over_cos_x());
        const auto r128 = isd_cgn(s128.a, s128.b, DenseVector(128, 0.0), 1e-7,
                                  config(1e-6, 500, ResidualReference::OriginalSystem));
        REQUIRE(std::abs(r128.iterations - 7.0) <= 2.0);
    }
    SECTION("tight inner tolerance reproduces the exact method") {
        for (double eps : {1e-2, 1e-3, 1e-4, 1e-6, 1e-10, 1e-16}) {
            const auto sys = gen_ode1d(eps, 64, SolutionChoice::x_sin_pi_x());
            const auto cfg = config(1e-6, 500, ResidualReference::OriginalSystem);
            const auto exact = esd_cgn(sys.a, sys.b, DenseVector(64, 0.0), cfg);
            const auto inexact = isd_cgn(sys.a, sys.b, DenseVector(64, 0.0), 1e-14, cfg);
            REQUIRE(inexact.iterations == exact.iterations);
        }
    }
    SECTION("invalid inner tolerance is rejected") {
        const auto sys = gen_ode1d(1e-2, 8, SolutionChoice::x_sin_pi_x());
        REQUIRE_THROWS_AS(
            isd_cgn(sys.a, sys.b, DenseVector(8, 0.0), 0.0, config(1e-6, 10)),
            InvalidParameterError);
    }
}

TEST_CASE("sd_minresn") {
    SECTION("indefinite symmetric part is handled through the dense fallback") {
        const double eps = 0.1;
        const SparseMatrix a = example22_lower(eps);
        const DenseVector b{1.0, 0.5};
        const auto rep = sd_minresn(a, b, PreconditionerSpec::self_dual(), config(1e-12, 50));
        REQUIRE(rep.status == SolveStatus::Converged);
        const DenseVector oracle = dense_solve_oracle(a.to_dense(), b);
        REQUIRE(rep.solution[0] == Approx(oracle[0]).epsilon(1e-8));
        REQUIRE(rep.solution[1] == Approx(oracle[1]).epsilon(1e-8));
    }
    SECTION("reduces to plain MINRES on an SPD symmetric matrix") {
        const SparseMatrix a = random_pd(10, 90, 0.0);
        const DenseVector b = random_vec(10, 91);
        const auto sd = sd_minresn(a, b, PreconditionerSpec::self_dual(), config(1e-10, 100));
        const auto plain = minres(LinearOperator::from_matrix(a, true, true), b,
                                  DenseVector(10, 0.0), config(1e-10, 100));
        REQUIRE(sd.iterations == plain.iterations);
        const double noise_floor = 1e-12 * plain.residual_history.front();
        for (std::size_t i = 0; i < sd.residual_history.size(); ++i)
            REQUIRE(sd.residual_history[i] ==
                    Approx(plain.residual_history[i]).epsilon(1e-10).margin(noise_floor));
    }
    SECTION("shifted preconditioner solves the indefinite reaction problem") {
        const auto sys = gen_pde_varcoef(900, -200.0, SolutionChoice::sin_sin_exp());
        const auto est = extreme_eigs(split(sys.a).s, 1e-8);
        auto spec = PreconditionerSpec::shifted_inverse_minus(1.01, -0.99 / est.lambda_max);
        spec.lambda_min_s = est.lambda_min;
        spec.lambda_max_s = est.lambda_max;
        const auto rep = sd_minresn(sys.a, sys.b, spec, config(1e-6, 3000));
        REQUIRE(rep.status == SolveStatus::Converged);
        // comparable to the CG count on the same preconditioned system
        const auto sys2 = build_selfdual_system(sys.a, sys.b, spec);
        const auto cg_rep = cg(sys2.op, sys2.rhs, DenseVector(900, 0.0), config(1e-6, 3000));
        REQUIRE(cg_rep.status == SolveStatus::Converged);
        REQUIRE(rep.iterations <= 1.5 * cg_rep.iterations);
        REQUIRE(rep.iterations >= 0.5 * cg_rep.iterations);
    }
}

TEST_CASE("iterated system") {
    SECTION("symmetric input gives the identity operator") {
        const SparseMatrix a = random_pd(8, 100, 0.0);
        const SymmetricSplit sp = split(a);
        const DenseVector b = random_vec(8, 101);
        const auto sys = iterated_system(sp, b);
        const DenseVector x = random_vec(8, 102);
        const DenseVector y = sys.op.apply(x);
        for (index_t i = 0; i < 8; ++i) REQUIRE(y[i] == Approx(x[i]).margin(1e-12));
        const SpdFactorization f(sp.s);
        const DenseVector fb = f.solve(b);
        for (index_t i = 0; i < 8; ++i) REQUIRE(sys.rhs[i] == Approx(fb[i]).margin(1e-12));
    }
    SECTION("2x2 symplectic case gives 1.25 I") {
        SymmetricSplit sp;
        sp.n = 2;
        sp.s = SparseMatrix::identity(2);
        sp.k = SparseMatrix::from_triplets(2, 2, {{0, 1, -0.5}, {1, 0, 0.5}});
        const auto sys = iterated_system(sp, {1.0, 2.0});
        const DenseVector y = sys.op.apply({1.0, 0.0});
        REQUIRE(y[0] == Approx(1.25).margin(1e-14));
        REQUIRE(y[1] == Approx(0.0).margin(1e-14));
    }
    SECTION("self-adjoint in the A_s inner product") {
        const SparseMatrix a = random_pd(6, 110);
        const SymmetricSplit sp = split(a);
        const auto sys = iterated_system(sp, random_vec(6, 111));
        const DenseVector x = random_vec(6, 112), y = random_vec(6, 113);
        const double lhs = dot(sp.s.apply(sys.op.apply(x)), y);
        const double rhs = dot(sp.s.apply(x), sys.op.apply(y));
        REQUIRE(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + std::abs(rhs) + 1.0));
    }
    SECTION("weighted CG solves the doubly preconditioned system") {
        const SparseMatrix a = random_pd(10, 120);
        const DenseVector b = random_vec(10, 121);
        const auto sys = iterated_system(split(a), b);
        const auto rep =
            cg(sys.op, sys.rhs, DenseVector(10, 0.0), config(1e-12, 200), &sys.weight);
        REQUIRE(rep.status == SolveStatus::Converged);
        const DenseVector oracle = dense_solve_oracle(a.to_dense(), b);
        for (index_t i = 0; i < 10; ++i)
            REQUIRE(rep.solution[i] == Approx(oracle[i]).epsilon(1e-7).margin(1e-9));
    }
}

TEST_CASE("self-dual functional") {
    SECTION("zero everywhere trivial cases") {
        const SparseMatrix id = SparseMatrix::identity(3);
        const auto z = functional(id, DenseVector(3, 0.0), DenseVector(3, 0.0));
        REQUIRE(z.value == 0.0);
        for (double g : z.gradient) REQUIRE(g == 0.0);
        const DenseVector b{1.0, -2.0, 0.5};
        const auto at_solution = functional(id, b, b);
        REQUIRE(at_solution.value == Approx(0.0).margin(1e-14));
        for (double g : at_solution.gradient) REQUIRE(g == Approx(0.0).margin(1e-14));
    }
    SECTION("vanishes at the solution and is nonnegative elsewhere") {
        const SparseMatrix a = random_pd(8, 130);
        const DenseVector b = random_vec(8, 131);
        const DenseVector xbar = dense_solve_oracle(a.to_dense(), b);
        const auto at_solution = functional(a, b, xbar);
        const SpdFactorization f(split(a).s);
        const double scale = dot(b, b) / 1.0;
        REQUIRE(at_solution.value <= 1e-10 * scale);
        REQUIRE(norm2(at_solution.gradient) <= 1e-8 * norm2(b));
        SplitMix64 rng(132);
        for (int t = 0; t < 100; ++t) {
            const DenseVector x = random_vec(8, rng.next_u64());
            REQUIRE(functional(a, b, x).value >= -1e-12 * scale);
        }
    }
    SECTION("gradient matches central finite differences") {
        const SparseMatrix a = random_pd(8, 140);
        const DenseVector b = random_vec(8, 141);
        const DenseVector x = random_vec(8, 142);
        const auto eval = functional(a, b, x);
        const double h = 1e-6;
        for (index_t i = 0; i < 8; ++i) {
            DenseVector xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (functional(a, b, xp).value - functional(a, b, xm).value) / (2 * h);
            REQUIRE(eval.gradient[i] == Approx(fd).epsilon(1e-5).margin(1e-7));
        }
    }
    SECTION("both algebraic forms agree") {
        const SparseMatrix a = random_pd(9, 150);
        const DenseVector b = random_vec(9, 151);
        SplitMix64 rng(152);
        for (int t = 0; t < 10; ++t) {
            const DenseVector x = random_vec(9, rng.next_u64());
            const double direct = functional(a, b, x).value;
            const double expanded = functional_expanded_value(a, b, x);
            REQUIRE(direct == Approx(expanded).epsilon(1e-10).margin(1e-12));
        }
    }
}

TEST_CASE("general splitting") {
    SECTION("specializes to the self-dual system") {
        const SparseMatrix a = random_pd(7, 160);
        const SymmetricSplit sp = split(a);
        const DenseVector b = random_vec(7, 161);
        const auto general = general_split_system(sp.s, sp.k, b);
        const auto selfdual = build_selfdual_system(a, b, PreconditionerSpec::self_dual());
        const DenseVector x = random_vec(7, 162);
        const DenseVector yg = general.op.apply(x);
        const DenseVector ys = selfdual.op.apply(x);
        double scale = 1e-300;
        for (double v : ys) scale = std::max(scale, std::abs(v));
        for (index_t i = 0; i < 7; ++i) REQUIRE(yg[i] == Approx(ys[i]).margin(1e-12 * scale));
        // note the self-dual rhs is A^T M b = b - A_a A_s^{-1} b, same as the split form
        for (index_t i = 0; i < 7; ++i)
            REQUIRE(general.rhs[i] == Approx(selfdual.rhs[i]).margin(1e-12 * scale));
    }
    SECTION("zero C leaves the system untouched") {
        const SparseMatrix a = random_pd(5, 170);
        const DenseVector b = random_vec(5, 171);
        const auto sys = general_split_system(a, SparseMatrix::from_triplets(5, 5, {}), b);
        const DenseVector x = random_vec(5, 172);
        const DenseVector y = sys.op.apply(x);
        const DenseVector ax = a.apply(x);
        for (index_t i = 0; i < 5; ++i) REQUIRE(y[i] == Approx(ax[i]).margin(1e-13));
        REQUIRE(sys.rhs == b);
    }
    SECTION("non-symmetric B through the dense path") {
        // B = diagonal + strict lower part of a random matrix, C the rest
        const DenseMatrix d = [&] {
            SplitMix64 rng(180);
            DenseMatrix m(5, 5);
            for (index_t i = 0; i < 5; ++i)
                for (index_t j = 0; j < 5; ++j) m(i, j) = rng.next_symmetric();
            for (index_t i = 0; i < 5; ++i) m(i, i) += 5.0;
            return m;
        }();
        DenseMatrix bl(5, 5), cu(5, 5);
        for (index_t i = 0; i < 5; ++i)
            for (index_t j = 0; j < 5; ++j) (j <= i ? bl : cu)(i, j) = d(i, j);
        const DenseVector rhs = random_vec(5, 181);
        const auto sys = general_split_system(SparseMatrix::from_dense(bl),
                                              SparseMatrix::from_dense(cu), rhs);
        // materialize the split operator and solve it densely
        DenseMatrix lhs(5, 5);
        DenseVector e(5, 0.0);
        for (index_t j = 0; j < 5; ++j) {
            e[j] = 1.0;
            const DenseVector col = sys.op.apply(e);
            for (index_t i = 0; i < 5; ++i) lhs(i, j) = col[i];
            e[j] = 0.0;
        }
        const DenseVector x_split = dense_solve_oracle(lhs, sys.rhs);
        const DenseVector x_direct = dense_solve_oracle(d, rhs);
        for (index_t i = 0; i < 5; ++i)
            REQUIRE(x_split[i] == Approx(x_direct[i]).epsilon(1e-9).margin(1e-11));
    }
}

TEST_CASE("operator identity of the two self-dual forms") {
    // A^T A_s^{-1} A x == (A_s - A_a A_s^{-1} A_a) x
    const SparseMatrix a = random_pd(9, 190);
    const SymmetricSplit sp = split(a);
    const SpdFactorization f(sp.s);
    SplitMix64 rng(191);
    for (int t = 0; t < 8; ++t) {
        const DenseVector x = random_vec(9, rng.next_u64());
        const DenseVector left = a.apply(f.solve(a.apply(x)), true);
        DenseVector right = sp.s.apply(x);
        const DenseVector kx = sp.k.apply(f.solve(sp.k.apply(x)));
        for (index_t i = 0; i < 9; ++i) right[i] -= kx[i];
        double scale = 1e-300;
        for (double v : left) scale = std::max(scale, std::abs(v));
        for (index_t i = 0; i < 9; ++i)
            REQUIRE(left[i] == Approx(right[i]).margin(1e-10 * scale));
    }
}
