#pragma once

#include <cmath>
#include <string>

#include "sdkrylov/cg.hpp"
#include "sdkrylov/cholesky.hpp"
#include "sdkrylov/operator.hpp"
#include "sdkrylov/split.hpp"

namespace sdkrylov {

enum class BaselineMethod { Cgne, Cgnr, BiCg, Cgs, BiCgStab, Qmr };

inline const char* to_string(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::Cgne: return "CGNE";
        case BaselineMethod::Cgnr: return "CGNR";
        case BaselineMethod::BiCg: return "BiCG";
        case BaselineMethod::Cgs: return "CGS";
        case BaselineMethod::BiCgStab: return "BiCGSTAB";
        case BaselineMethod::Qmr: return "QMR";
    }
    return "?";
}

/// Preconditioner hooks for the baseline methods. `solve` applies M^{-1};
/// the m1/m2 quadruple covers QMR's two-sided form M = M1 M2. An SPD M
/// splits through its Cholesky factor; a symmetric-indefinite M applies
/// from the left (M1 = M, M2 = I).
struct SymPrecond {
    std::function<DenseVector(const DenseVector&)> solve;
    std::function<DenseVector(const DenseVector&)> m1_inv;
    std::function<DenseVector(const DenseVector&)> m2_inv;
    std::function<DenseVector(const DenseVector&)> m1_inv_t;
    std::function<DenseVector(const DenseVector&)> m2_inv_t;

    static SymPrecond from_spd(const SpdFactorization& f) {
        SymPrecond p;
        p.solve = [&f](const DenseVector& v) { return f.solve(v); };
        p.m1_inv = [&f](const DenseVector& v) { return f.solve_lower(v); };
        p.m2_inv = [&f](const DenseVector& v) { return f.solve_lower_transpose(v); };
        p.m1_inv_t = p.m2_inv;
        p.m2_inv_t = p.m1_inv;
        return p;
    }

    static SymPrecond from_symmetric_indefinite(const DenseLu& lu) {
        SymPrecond p;
        p.solve = [&lu](const DenseVector& v) { return lu.solve(v); };
        p.m1_inv = p.solve;
        p.m1_inv_t = p.solve;
        p.m2_inv = [](const DenseVector& v) { return v; };
        p.m2_inv_t = p.m2_inv;
        return p;
    }
};

namespace detail {

inline bool bad(double v) { return v == 0.0 || !std::isfinite(v); }

inline void record_original_residual(SolveReport& rep, const SparseMatrix& a,
                                     const DenseVector& b) {
    DenseVector r = b;
    const DenseVector ax = a.apply(rep.solution);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
    const double nb = norm2(b);
    rep.original_relative_residual = nb > 0.0 ? norm2(r) / nb : norm2(r);
}

inline SolveReport solve_cgne(const SparseMatrix& a, const DenseVector& b, const SolveConfig& cfg) {
    LinearOperator op;
    op.dimension = a.n_rows();
    op.symmetric = true;
    op.positive_definite = true;
    op.apply = [&a](const DenseVector& y) { return a.apply(a.apply(y, true)); };
    SolveReport rep = cg(op, b, DenseVector(b.size(), 0.0), cfg);
    rep.matvec_count *= 2;
    rep.solution = a.apply(rep.solution, true);
    ++rep.matvec_count;
    return rep;
}

inline SolveReport solve_cgnr(const SparseMatrix& a, const DenseVector& b, const SolveConfig& cfg) {
    LinearOperator op;
    op.dimension = a.n_cols();
    op.symmetric = true;
    op.positive_definite = true;
    op.apply = [&a](const DenseVector& x) { return a.apply(a.apply(x), true); };
    SolveReport rep = cg(op, a.apply(b, true), DenseVector(b.size(), 0.0), cfg);
    rep.matvec_count = rep.matvec_count * 2 + 1;
    return rep;
}

inline SolveReport solve_bicg(const SparseMatrix& a, const DenseVector& b,
                              const SymPrecond* m, const SolveConfig& cfg) {
    const std::size_t n = b.size();
    SolveReport rep;
    rep.solution.assign(n, 0.0);
    DenseVector r = b, rt = b;
    const double ref = norm2(b);
    rep.residual_history.push_back(norm2(r));
    if (rep.residual_history.back() <= cfg.tol * ref) {
        rep.status = SolveStatus::Converged;
        return rep;
    }
    DenseVector p, pt;
    double rho_prev = 0.0;
    for (index_t i = 1; i <= cfg.max_iterations; ++i) {
        DenseVector z = m ? m->solve(r) : r;
        DenseVector zt = m ? m->solve(rt) : rt;
        if (m) rep.inner_solve_count += 2;
        const double rho = dot(z, rt);
        if (bad(rho)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (i == 1) {
            p = z;
            pt = zt;
        } else {
            const double beta = rho / rho_prev;
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = z[j] + beta * p[j];
                pt[j] = zt[j] + beta * pt[j];
            }
        }
        const DenseVector q = a.apply(p);
        const DenseVector qt = a.apply(pt, true);
        rep.matvec_count += 2;
        const double denom = dot(pt, q);
        if (bad(denom)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        const double alpha = rho / denom;
        axpy(alpha, p, rep.solution);
        axpy(-alpha, q, r);
        axpy(-alpha, qt, rt);
        rep.residual_history.push_back(norm2(r));
        rep.iterations = static_cast<double>(i);
        if (!std::isfinite(rep.residual_history.back())) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (rep.residual_history.back() <= cfg.tol * ref) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        rho_prev = rho;
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

inline SolveReport solve_cgs(const SparseMatrix& a, const DenseVector& b,
                             const SymPrecond* m, const SolveConfig& cfg) {
    const std::size_t n = b.size();
    SolveReport rep;
    rep.solution.assign(n, 0.0);
    DenseVector r = b;
    const DenseVector rt = b;
    const double ref = norm2(b);
    rep.residual_history.push_back(norm2(r));
    if (rep.residual_history.back() <= cfg.tol * ref) {
        rep.status = SolveStatus::Converged;
        return rep;
    }
    DenseVector u, p, q(n, 0.0);
    double rho_prev = 0.0;
    for (index_t i = 1; i <= cfg.max_iterations; ++i) {
        const double rho = dot(rt, r);
        if (bad(rho)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (i == 1) {
            u = r;
            p = u;
        } else {
            const double beta = rho / rho_prev;
            u.resize(n);
            for (std::size_t j = 0; j < n; ++j) u[j] = r[j] + beta * q[j];
            for (std::size_t j = 0; j < n; ++j) p[j] = u[j] + beta * (q[j] + beta * p[j]);
        }
        const DenseVector phat = m ? m->solve(p) : p;
        if (m) ++rep.inner_solve_count;
        const DenseVector vhat = a.apply(phat);
        ++rep.matvec_count;
        const double sigma = dot(rt, vhat);
        if (bad(sigma)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        const double alpha = rho / sigma;
        for (std::size_t j = 0; j < n; ++j) q[j] = u[j] - alpha * vhat[j];
        DenseVector uq(n);
        for (std::size_t j = 0; j < n; ++j) uq[j] = u[j] + q[j];
        const DenseVector uhat = m ? m->solve(uq) : uq;
        if (m) ++rep.inner_solve_count;
        axpy(alpha, uhat, rep.solution);
        const DenseVector qhat = a.apply(uhat);
        ++rep.matvec_count;
        axpy(-alpha, qhat, r);
        rep.residual_history.push_back(norm2(r));
        rep.iterations = static_cast<double>(i);
        if (!std::isfinite(rep.residual_history.back())) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (rep.residual_history.back() <= cfg.tol * ref) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        rho_prev = rho;
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

inline SolveReport solve_bicgstab(const SparseMatrix& a, const DenseVector& b,
                                  const SymPrecond* m, const SolveConfig& cfg) {
    const std::size_t n = b.size();
    SolveReport rep;
    rep.solution.assign(n, 0.0);
    DenseVector r = b;
    const DenseVector rt = b;
    const double ref = norm2(b);
    rep.residual_history.push_back(norm2(r));
    if (rep.residual_history.back() <= cfg.tol * ref) {
        rep.status = SolveStatus::Converged;
        return rep;
    }
    DenseVector p(n, 0.0), v(n, 0.0);
    double rho_prev = 0.0, alpha = 0.0, omega = 0.0;
    for (index_t i = 1; i <= cfg.max_iterations; ++i) {
        const double rho = dot(rt, r);
        if (bad(rho)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (i == 1) {
            p = r;
        } else {
            const double beta = (rho / rho_prev) * (alpha / omega);
            if (!std::isfinite(beta)) {
                rep.status = SolveStatus::Breakdown;
                return rep;
            }
            for (std::size_t j = 0; j < n; ++j) p[j] = r[j] + beta * (p[j] - omega * v[j]);
        }
        const DenseVector phat = m ? m->solve(p) : p;
        if (m) ++rep.inner_solve_count;
        v = a.apply(phat);
        ++rep.matvec_count;
        const double sigma = dot(rt, v);
        if (bad(sigma)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        alpha = rho / sigma;
        DenseVector s = r;
        axpy(-alpha, v, s);
        const double snorm = norm2(s);
        rep.residual_history.push_back(snorm);
        if (!std::isfinite(snorm)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (snorm <= cfg.tol * ref) {
            axpy(alpha, phat, rep.solution);
            rep.iterations = static_cast<double>(i) - 0.5;
            rep.status = SolveStatus::Converged;
            return rep;
        }
        const DenseVector shat = m ? m->solve(s) : s;
        if (m) ++rep.inner_solve_count;
        const DenseVector t = a.apply(shat);
        ++rep.matvec_count;
        const double tt = dot(t, t);
        if (bad(tt)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        omega = dot(t, s) / tt;
        if (bad(omega)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        axpy(alpha, phat, rep.solution);
        axpy(omega, shat, rep.solution);
        r = s;
        axpy(-omega, t, r);
        rep.residual_history.push_back(norm2(r));
        rep.iterations = static_cast<double>(i);
        if (!std::isfinite(rep.residual_history.back())) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (rep.residual_history.back() <= cfg.tol * ref) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        rho_prev = rho;
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

inline SolveReport solve_qmr(const SparseMatrix& a, const DenseVector& b,
                             const SymPrecond* m, const SolveConfig& cfg) {
    const std::size_t n = b.size();
    SolveReport rep;
    rep.solution.assign(n, 0.0);
    DenseVector r = b;
    const double ref = norm2(b);
    rep.residual_history.push_back(norm2(r));
    if (rep.residual_history.back() <= cfg.tol * ref) {
        rep.status = SolveStatus::Converged;
        return rep;
    }
    const auto m1_inv = [&](const DenseVector& x) {
        if (m) ++rep.inner_solve_count;
        return m ? m->m1_inv(x) : x;
    };
    const auto m2_inv = [&](const DenseVector& x) {
        if (m) ++rep.inner_solve_count;
        return m ? m->m2_inv(x) : x;
    };
    const auto m1_inv_t = [&](const DenseVector& x) {
        if (m) ++rep.inner_solve_count;
        return m ? m->m1_inv_t(x) : x;
    };
    const auto m2_inv_t = [&](const DenseVector& x) {
        if (m) ++rep.inner_solve_count;
        return m ? m->m2_inv_t(x) : x;
    };

    DenseVector vt = r;
    DenseVector y = m1_inv(vt);
    double rho = norm2(y);
    DenseVector wt = r;
    DenseVector z = m2_inv_t(wt);
    double xi = norm2(z);
    double gamma = 1.0, eta = -1.0, theta = 0.0, eps_prev = 0.0;
    DenseVector v(n, 0.0), w(n, 0.0), p, q, d(n, 0.0), svec(n, 0.0);

    for (index_t i = 1; i <= cfg.max_iterations; ++i) {
        if (bad(rho) || bad(xi)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = vt[j] / rho;
            y[j] /= rho;
            w[j] = wt[j] / xi;
            z[j] /= xi;
        }
        const double delta = dot(z, y);
        if (bad(delta)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        const DenseVector yt = m2_inv(y);
        const DenseVector zt = m1_inv_t(z);
        if (i == 1) {
            p = yt;
            q = zt;
        } else {
            const double cp = xi * delta / eps_prev;
            const double cq = rho * delta / eps_prev;
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = yt[j] - cp * p[j];
                q[j] = zt[j] - cq * q[j];
            }
        }
        const DenseVector pt = a.apply(p);
        ++rep.matvec_count;
        const double eps = dot(q, pt);
        if (bad(eps)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        const double beta = eps / delta;
        if (bad(beta)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        for (std::size_t j = 0; j < n; ++j) vt[j] = pt[j] - beta * v[j];
        y = m1_inv(vt);
        const double rho_new = norm2(y);
        const DenseVector atq = a.apply(q, true);
        ++rep.matvec_count;
        for (std::size_t j = 0; j < n; ++j) wt[j] = atq[j] - beta * w[j];
        z = m2_inv_t(wt);
        xi = norm2(z);
        const double theta_new = rho_new / (gamma * std::abs(beta));
        const double gamma_new = 1.0 / std::sqrt(1.0 + theta_new * theta_new);
        if (bad(gamma_new)) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        eta = -eta * rho * gamma_new * gamma_new / (beta * gamma * gamma);
        if (i == 1) {
            for (std::size_t j = 0; j < n; ++j) {
                d[j] = eta * p[j];
                svec[j] = eta * pt[j];
            }
        } else {
            const double c = theta * gamma_new * theta * gamma_new;
            for (std::size_t j = 0; j < n; ++j) {
                d[j] = eta * p[j] + c * d[j];
                svec[j] = eta * pt[j] + c * svec[j];
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            rep.solution[j] += d[j];
            r[j] -= svec[j];
        }
        rep.residual_history.push_back(norm2(r));
        rep.iterations = static_cast<double>(i);
        if (!std::isfinite(rep.residual_history.back())) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
        if (rep.residual_history.back() <= cfg.tol * ref) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        rho = rho_new;
        theta = theta_new;
        gamma = gamma_new;
        eps_prev = eps;
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

}  // namespace detail

/// Run one of the textbook non-symmetric methods from a zero start with an
/// arbitrary symmetric preconditioner (ignored by the normal-equation
/// methods). Residual histories are of the system each method iterates: the
/// original one for BiCG/CGS/BiCGSTAB/QMR, the normal equations for
/// CGNE/CGNR.
inline SolveReport baseline_solve(BaselineMethod method, const SparseMatrix& a,
                                  const DenseVector& b, const SymPrecond* precond,
                                  const SolveConfig& cfg) {
    cfg.validate();
    if (!a.is_square()) throw NonSquareError("baseline_solve: matrix not square");
    if (b.size() != static_cast<std::size_t>(a.n_rows()))
        throw DimensionMismatchError("baseline_solve: rhs length");
    SolveReport rep;
    switch (method) {
        case BaselineMethod::Cgne: rep = detail::solve_cgne(a, b, cfg); break;
        case BaselineMethod::Cgnr: rep = detail::solve_cgnr(a, b, cfg); break;
        case BaselineMethod::BiCg: rep = detail::solve_bicg(a, b, precond, cfg); break;
        case BaselineMethod::Cgs: rep = detail::solve_cgs(a, b, precond, cfg); break;
        case BaselineMethod::BiCgStab: rep = detail::solve_bicgstab(a, b, precond, cfg); break;
        case BaselineMethod::Qmr: rep = detail::solve_qmr(a, b, precond, cfg); break;
    }
    detail::record_original_residual(rep, a, b);
    return rep;
}

/// Convenience overload: symmetric-part preconditioning through an SPD
/// factorization (left application, split two-sided for QMR).
inline SolveReport baseline_solve(BaselineMethod method, const SparseMatrix& a,
                                  const DenseVector& b, const SpdFactorization& precond,
                                  const SolveConfig& cfg) {
    const SymPrecond p = SymPrecond::from_spd(precond);
    return baseline_solve(method, a, b, &p, cfg);
}

enum class StationaryVariant { FirstOrder, Squared };

/// Fixed-point iteration on the symmetric/anti-symmetric decomposition.
/// FirstOrder solves A_s x_k = -A_a x_{k-1} + b and converges iff
/// rho(A_s^{-1} A_a) < 1; Squared iterates the once-more-preconditioned
/// system and contracts with the square of that spectral radius.
inline SolveReport stationary_iteration(const SymmetricSplit& split, const DenseVector& b,
                                        StationaryVariant variant, const SolveConfig& cfg) {
    cfg.validate();
    if (b.size() != static_cast<std::size_t>(split.n))
        throw DimensionMismatchError("stationary_iteration: rhs length");
    const SpdFactorization f(split.s);
    const std::size_t n = b.size();
    SolveReport rep;
    rep.solution.assign(n, 0.0);

    if (variant == StationaryVariant::FirstOrder) {
        DenseVector r = b;  // residual of the original system at x = 0
        const double ref = norm2(b);
        rep.residual_history.push_back(norm2(r));
        for (index_t k = 1; k <= cfg.max_iterations; ++k) {
            DenseVector t = split.k.apply(rep.solution);
            ++rep.matvec_count;
            for (std::size_t i = 0; i < n; ++i) t[i] = b[i] - t[i];
            rep.solution = f.solve(t);
            ++rep.inner_solve_count;
            DenseVector ax = split.s.apply(rep.solution);
            const DenseVector kx = split.k.apply(rep.solution);
            rep.matvec_count += 2;
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i] - kx[i];
            rep.residual_history.push_back(norm2(r));
            rep.iterations = static_cast<double>(k);
            if (rep.residual_history.back() <= cfg.tol * ref) {
                rep.status = SolveStatus::Converged;
                break;
            }
            if (rep.residual_history.back() >= 1e6 * rep.residual_history.front() ||
                !std::isfinite(rep.residual_history.back())) {
                rep.status = SolveStatus::Diverged;
                break;
            }
        }
        if (rep.status != SolveStatus::Converged && rep.status != SolveStatus::Diverged)
            rep.status = SolveStatus::MaxIterations;
    } else {
        // bbar = b - A_a A_s^{-1} b; iterate A_s x = A_a A_s^{-1} A_a x + bbar
        DenseVector bbar = split.k.apply(f.solve(b));
        ++rep.inner_solve_count;
        ++rep.matvec_count;
        for (std::size_t i = 0; i < n; ++i) bbar[i] = b[i] - bbar[i];
        const double ref = norm2(bbar);
        DenseVector vcur(n, 0.0);  // A_a A_s^{-1} A_a x_k
        rep.residual_history.push_back(ref);
        for (index_t k = 1; k <= cfg.max_iterations; ++k) {
            DenseVector t(n);
            for (std::size_t i = 0; i < n; ++i) t[i] = vcur[i] + bbar[i];
            rep.solution = f.solve(t);
            ++rep.inner_solve_count;
            const DenseVector vnew =
                split.k.apply(f.solve(split.k.apply(rep.solution)));
            ++rep.inner_solve_count;
            rep.matvec_count += 2;
            DenseVector r(n);
            for (std::size_t i = 0; i < n; ++i) r[i] = vnew[i] - vcur[i];
            vcur = vnew;
            rep.residual_history.push_back(norm2(r));
            rep.iterations = static_cast<double>(k);
            if (rep.residual_history.back() <= cfg.tol * ref) {
                rep.status = SolveStatus::Converged;
                break;
            }
            if (rep.residual_history.back() >= 1e6 * rep.residual_history.front() ||
                !std::isfinite(rep.residual_history.back())) {
                rep.status = SolveStatus::Diverged;
                break;
            }
        }
        if (rep.status != SolveStatus::Converged && rep.status != SolveStatus::Diverged)
            rep.status = SolveStatus::MaxIterations;
    }

    DenseVector r = b;
    const DenseVector sx = split.s.apply(rep.solution);
    const DenseVector kx = split.k.apply(rep.solution);
    for (std::size_t i = 0; i < n; ++i) r[i] -= sx[i] + kx[i];
    const double nb = norm2(b);
    rep.original_relative_residual = nb > 0.0 ? norm2(r) / nb : norm2(r);
    return rep;
}

}  // namespace sdkrylov
