#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "sdkrylov/cg.hpp"
#include "sdkrylov/cholesky.hpp"
#include "sdkrylov/eig.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/minres.hpp"
#include "sdkrylov/operator.hpp"
#include "sdkrylov/split.hpp"

namespace sdkrylov {

inline constexpr index_t kDenseInnerLimit = 2000;

/// How the inner systems (the M^{-1}-type applications) are solved: Exact
/// factors the inner matrix once; Inexact runs a nested CG to `inner_tol`
/// from a zero start on every application.
struct InnerMode {
    enum class Kind { Exact, Inexact };
    Kind kind = Kind::Exact;
    double inner_tol = 1e-7;

    static InnerMode exact() { return {Kind::Exact, 0.0}; }
    static InnerMode inexact(double tol) {
        if (!(tol > 0.0 && tol < 1.0)) throw InvalidParameterError("inner_tol out of (0,1)");
        return {Kind::Inexact, tol};
    }
};

/// Which symmetric M turns Ax=b into A^T M A x = A^T M b.
///   SelfDual            M = A_s^{-1}
///   NormalEquations     M = I
///   ResolventAlpha      M = (alpha A_s + (1-alpha) I)^{-1}
///   ResolventBeta       M = beta A_s^{-1} + (1-beta) I
///   Combined            M = (alpha A_s + (1-alpha) I)^{-1} + beta I
///   ShiftedInverse      M = (A_s - alpha lambda_min(A_s) I)^{-1}
///   ShiftedInverseMinus M = (A_s - alpha lambda_min(A_s) I)^{-1} + beta I
///   GeneralSplit        the system (B - C B^{-1} C) x = b - C B^{-1} b
/// Shifted kinds need lambda_min(A_s) (and callers often parameterize beta
/// by lambda_max); both are computed at build time to relative tolerance
/// 1e-8 and cached here, or can be supplied up front.
struct PreconditionerSpec {
    enum class Kind {
        SelfDual,
        NormalEquations,
        ResolventAlpha,
        ResolventBeta,
        Combined,
        ShiftedInverse,
        ShiftedInverseMinus,
        GeneralSplit
    };
    Kind kind = Kind::SelfDual;
    double alpha = 0.0;
    double beta = 0.0;
    SparseMatrix b_mat, c_mat;  // GeneralSplit only
    std::optional<double> lambda_min_s;
    std::optional<double> lambda_max_s;

    static PreconditionerSpec self_dual() { return {Kind::SelfDual}; }
    static PreconditionerSpec normal_equations() { return {Kind::NormalEquations}; }
    static PreconditionerSpec resolvent_alpha(double alpha) {
        PreconditionerSpec s{Kind::ResolventAlpha};
        s.alpha = alpha;
        return s;
    }
    static PreconditionerSpec resolvent_beta(double beta) {
        PreconditionerSpec s{Kind::ResolventBeta};
        s.beta = beta;
        return s;
    }
    static PreconditionerSpec combined(double alpha, double beta) {
        PreconditionerSpec s{Kind::Combined};
        s.alpha = alpha;
        s.beta = beta;
        return s;
    }
    static PreconditionerSpec shifted_inverse(double alpha) {
        PreconditionerSpec s{Kind::ShiftedInverse};
        s.alpha = alpha;
        return s;
    }
    static PreconditionerSpec shifted_inverse_minus(double alpha, double beta) {
        PreconditionerSpec s{Kind::ShiftedInverseMinus};
        s.alpha = alpha;
        s.beta = beta;
        return s;
    }
    static PreconditionerSpec general_split(SparseMatrix b, SparseMatrix c) {
        PreconditionerSpec s{Kind::GeneralSplit};
        s.b_mat = std::move(b);
        s.c_mat = std::move(c);
        return s;
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::SelfDual: return "selfdual";
            case Kind::NormalEquations: return "normal";
            case Kind::ResolventAlpha: os << "alpha=" << alpha; break;
            case Kind::ResolventBeta: os << "beta=" << beta; break;
            case Kind::Combined: os << "combined=" << alpha << "," << beta; break;
            case Kind::ShiftedInverse: os << "shifted=" << alpha; break;
            case Kind::ShiftedInverseMinus: os << "shifted=" << alpha << "," << beta; break;
            case Kind::GeneralSplit: return "general-split";
        }
        return os.str();
    }
};

struct OpCounters {
    std::atomic<std::size_t> matvecs{0};
    std::atomic<std::size_t> inner_solves{0};
    std::atomic<std::size_t> inner_iterations{0};
};

/// The built symmetric system: `op` applies A^T M A (or B - C B^{-1} C) by
/// the factored operator chain; the product matrix is never materialized.
/// Immutable and shareable once built; counters are atomic.
struct SelfdualSystem {
    LinearOperator op;
    DenseVector rhs;
    PreconditionerSpec spec;
    SparseMatrix original;
    SymmetricSplit split;
    std::shared_ptr<OpCounters> counters;
};

namespace detail {

using InnerSolveFn = std::function<DenseVector(const DenseVector&)>;

/// Inner-matrix solver: exact SPD factorization, a dense LU fallback for
/// symmetric-indefinite inner matrices when `allow_indefinite` (needed by
/// the MINRES-side specs on indefinite symmetric parts), or nested CG in
/// Inexact mode.
inline InnerSolveFn make_inner_solver(const SparseMatrix& m, const InnerMode& mode,
                                      bool allow_indefinite,
                                      const std::shared_ptr<OpCounters>& counters) {
    if (mode.kind == InnerMode::Kind::Inexact) {
        const double tol = mode.inner_tol;
        const index_t cap = 10 * m.n_rows() + 10;
        LinearOperator op = LinearOperator::from_matrix(m, true, true);
        return [op, tol, cap, counters](const DenseVector& q) {
            SolveConfig icfg;
            icfg.tol = tol;
            icfg.max_iterations = cap;
            const SolveReport rep = cg(op, q, DenseVector(q.size(), 0.0), icfg);
            counters->inner_solves += 1;
            counters->inner_iterations += static_cast<std::size_t>(rep.iterations);
            if (rep.status == SolveStatus::Breakdown)
                throw NotPositiveDefiniteError(static_cast<std::size_t>(-1));
            if (rep.status != SolveStatus::Converged)
                throw InnerSolveFailedError("nested CG exhausted its iteration budget");
            return rep.solution;
        };
    }
    try {
        auto f = std::make_shared<SpdFactorization>(m);
        return [f, counters](const DenseVector& q) {
            counters->inner_solves += 1;
            return f->solve(q);
        };
    } catch (const NotPositiveDefiniteError&) {
        if (!allow_indefinite) throw;
        if (m.n_rows() > kDenseInnerLimit) throw;
        auto lu = std::make_shared<DenseLu>(m.to_dense());
        return [lu, counters](const DenseVector& q) {
            counters->inner_solves += 1;
            return lu->solve(q);
        };
    }
}

inline void ensure_lambdas(PreconditionerSpec& spec, const SparseMatrix& as) {
    if (!spec.lambda_min_s || !spec.lambda_max_s) {
        const SpectrumEstimate est = extreme_eigs(as, 1e-8);
        spec.lambda_min_s = est.lambda_min;
        spec.lambda_max_s = est.lambda_max;
    }
}

}  // namespace detail

/// Build the symmetric system A^T M A x = A^T M b for the given M. The
/// operator evaluates by the chain (apply A, apply M, apply A^T); the
/// right-hand side is computed once. Inner matrices that must be positive
/// definite are factored here, so NotPositiveDefiniteError surfaces at
/// build time.
inline SelfdualSystem build_selfdual_system(const SparseMatrix& a, const DenseVector& b,
                                            PreconditionerSpec spec,
                                            const InnerMode& inner = InnerMode::exact()) {
    if (!a.is_square()) throw NonSquareError("build_selfdual_system: matrix not square");
    if (b.size() != static_cast<std::size_t>(a.n_rows()))
        throw DimensionMismatchError("build_selfdual_system: rhs length");

    SelfdualSystem sys;
    sys.counters = std::make_shared<OpCounters>();
    sys.original = a;

    if (spec.kind == PreconditionerSpec::Kind::GeneralSplit) {
        const SparseMatrix& bm = spec.b_mat;
        const SparseMatrix& cm = spec.c_mat;
        if (!bm.is_square() || bm.n_rows() != a.n_rows() || cm.n_rows() != a.n_rows() ||
            !cm.is_square())
            throw DimensionMismatchError("general split: B/C shape");
        detail::InnerSolveFn bsolve;
        const bool b_symmetric = [&] {
            const SparseMatrix bt = bm.transposed();
            return bt.row_offsets() == bm.row_offsets() && bt.col_indices() == bm.col_indices() &&
                   bt.values() == bm.values();
        }();
        if (b_symmetric) {
            try {
                bsolve = detail::make_inner_solver(bm, inner, true, sys.counters);
            } catch (const NotPositiveDefiniteError&) {
                throw SingularError("general split: symmetric B not factorizable");
            }
        } else {
            if (bm.n_rows() > kDenseInnerLimit)
                throw InvalidParameterError("general split: non-symmetric B limited to n <= 2000");
            auto lu = std::make_shared<DenseLu>(bm.to_dense());
            auto counters = sys.counters;
            bsolve = [lu, counters](const DenseVector& q) {
                counters->inner_solves += 1;
                return lu->solve(q);
            };
        }
        sys.spec = spec;
        auto counters = sys.counters;
        sys.op.dimension = a.n_rows();
        sys.op.apply = [bm, cm, bsolve, counters](const DenseVector& x) {
            DenseVector out = bm.apply(x);
            const DenseVector t = cm.apply(bsolve(cm.apply(x)));
            counters->matvecs += 3;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] -= t[i];
            return out;
        };
        sys.op.apply_transpose = sys.op.apply;
        sys.op.symmetric = probe_symmetric(sys.op);
        sys.rhs = b;
        const DenseVector t = cm.apply(bsolve(b));
        for (std::size_t i = 0; i < sys.rhs.size(); ++i) sys.rhs[i] -= t[i];
        return sys;
    }

    sys.split = split(a);
    const SparseMatrix& as = sys.split.s;

    std::function<DenseVector(const DenseVector&)> apply_m;
    bool m_positive_definite = false;
    switch (spec.kind) {
        case PreconditionerSpec::Kind::NormalEquations:
            apply_m = [](const DenseVector& q) { return q; };
            m_positive_definite = true;
            break;
        case PreconditionerSpec::Kind::SelfDual: {
            auto solve_as = detail::make_inner_solver(as, inner, true, sys.counters);
            apply_m = solve_as;
            m_positive_definite = probe_positive_definite(as);
            break;
        }
        case PreconditionerSpec::Kind::ResolventAlpha: {
            const SparseMatrix mm = add_scaled_identity(as, spec.alpha, 1.0 - spec.alpha);
            apply_m = detail::make_inner_solver(mm, inner, false, sys.counters);
            m_positive_definite = true;
            break;
        }
        case PreconditionerSpec::Kind::ResolventBeta: {
            auto solve_as = detail::make_inner_solver(as, inner, true, sys.counters);
            const double beta = spec.beta;
            apply_m = [solve_as, beta](const DenseVector& q) {
                DenseVector out = solve_as(q);
                for (std::size_t i = 0; i < out.size(); ++i)
                    out[i] = beta * out[i] + (1.0 - beta) * q[i];
                return out;
            };
            m_positive_definite = beta >= 0.0 && beta <= 1.0;
            break;
        }
        case PreconditionerSpec::Kind::Combined: {
            const SparseMatrix mm = add_scaled_identity(as, spec.alpha, 1.0 - spec.alpha);
            auto solve_inner = detail::make_inner_solver(mm, inner, false, sys.counters);
            const double beta = spec.beta;
            apply_m = [solve_inner, beta](const DenseVector& q) {
                DenseVector out = solve_inner(q);
                for (std::size_t i = 0; i < out.size(); ++i) out[i] += beta * q[i];
                return out;
            };
            m_positive_definite = beta >= 0.0;
            break;
        }
        case PreconditionerSpec::Kind::ShiftedInverse:
        case PreconditionerSpec::Kind::ShiftedInverseMinus: {
            detail::ensure_lambdas(spec, as);
            const SparseMatrix mm =
                add_scaled_identity(as, 1.0, -spec.alpha * (*spec.lambda_min_s));
            auto solve_inner = detail::make_inner_solver(mm, inner, false, sys.counters);
            if (spec.kind == PreconditionerSpec::Kind::ShiftedInverse) {
                apply_m = solve_inner;
                m_positive_definite = true;
            } else {
                const double beta = spec.beta;
                apply_m = [solve_inner, beta](const DenseVector& q) {
                    DenseVector out = solve_inner(q);
                    for (std::size_t i = 0; i < out.size(); ++i) out[i] += beta * q[i];
                    return out;
                };
                m_positive_definite = beta >= 0.0;
            }
            break;
        }
        case PreconditionerSpec::Kind::GeneralSplit:
            break;  // handled above
    }

    sys.spec = std::move(spec);
    auto counters = sys.counters;
    const SparseMatrix amat = a;
    sys.op.dimension = a.n_rows();
    sys.op.apply = [amat, apply_m, counters](const DenseVector& x) {
        counters->matvecs += 2;
        return amat.apply(apply_m(amat.apply(x)), true);
    };
    sys.op.apply_transpose = sys.op.apply;
    sys.op.symmetric = true;
    sys.op.positive_definite = m_positive_definite;
    sys.rhs = amat.apply(apply_m(b), true);
    return sys;
}

namespace detail {

using RecordingInnerSolveFn = std::function<DenseVector(const DenseVector&, SolveReport&)>;

/// The Table-1 recurrence shared by the exact and inexact self-dual CG:
/// conjugate gradients on A_s - A_a A_s^{-1} A_a, the A_s-solves delegated
/// to `inner_solve`. The stopping test follows cfg.residual_reference: the
/// transformed system's own residual, or the original ||b - A x|| / ||b||
/// computed per iterate (which is also what the residual history records
/// in that mode).
inline SolveReport selfdual_cg_core(const SparseMatrix& a, const SymmetricSplit& sp,
                                    const DenseVector& b, const DenseVector& x0,
                                    const SolveConfig& cfg,
                                    const RecordingInnerSolveFn& raw_inner_solve) {
    const std::size_t n = b.size();
    const bool original_ref = cfg.residual_reference == ResidualReference::OriginalSystem;

    SolveReport rep;
    const auto inner_solve = [&](const DenseVector& q) { return raw_inner_solve(q, rep); };

    rep.solution = x0;
    DenseVector y = inner_solve(b);
    DenseVector bbar = b;
    {
        const DenseVector t = sp.k.apply(y);
        for (std::size_t i = 0; i < n; ++i) bbar[i] -= t[i];
    }
    const DenseVector y0 = inner_solve(sp.k.apply(x0));
    DenseVector r = bbar;
    {
        const DenseVector sx = sp.s.apply(rep.solution);
        const DenseVector ky = sp.k.apply(y0);
        for (std::size_t i = 0; i < n; ++i) r[i] += ky[i] - sx[i];
    }
    rep.matvec_count += 4;

    const auto original_residual = [&](const DenseVector& x) {
        DenseVector res = b;
        const DenseVector ax = a.apply(x);
        ++rep.matvec_count;
        for (std::size_t i = 0; i < n; ++i) res[i] -= ax[i];
        return norm2(res);
    };

    const double ref = original_ref ? norm2(b) : norm2(bbar);
    double rr = dot(r, r);
    rep.residual_history.push_back(original_ref ? original_residual(rep.solution)
                                                : std::sqrt(rr));
    DenseVector p = r;
    if (rep.residual_history.back() <= cfg.tol * ref) {
        rep.status = SolveStatus::Converged;
    } else {
        for (index_t k = 1; k <= cfg.max_iterations; ++k) {
            const DenseVector z = inner_solve(sp.k.apply(p));
            DenseVector w = sp.s.apply(p);
            {
                const DenseVector kz = sp.k.apply(z);
                for (std::size_t i = 0; i < n; ++i) w[i] -= kz[i];
            }
            rep.matvec_count += 3;
            const double pw = dot(p, w);
            if (!(pw > 0.0)) {
                rep.status = SolveStatus::Breakdown;
                rep.iterations = static_cast<double>(k - 1);
                break;
            }
            const double alpha = rr / pw;
            axpy(alpha, p, rep.solution);
            axpy(-alpha, w, r);
            const double rr_new = dot(r, r);
            rep.residual_history.push_back(original_ref ? original_residual(rep.solution)
                                                        : std::sqrt(rr_new));
            rep.iterations = static_cast<double>(k);
            if (rep.residual_history.back() <= cfg.tol * ref) {
                rep.status = SolveStatus::Converged;
                break;
            }
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        }
        if (rep.status != SolveStatus::Converged && rep.status != SolveStatus::Breakdown)
            rep.status = SolveStatus::MaxIterations;
    }

    DenseVector res = b;
    const DenseVector ax = a.apply(rep.solution);
    for (std::size_t i = 0; i < n; ++i) res[i] -= ax[i];
    const double nb = norm2(b);
    rep.original_relative_residual = nb > 0.0 ? norm2(res) / nb : norm2(res);
    return rep;
}

}  // namespace detail

/// Exact self-dual CG: conjugate gradients on A^T A_s^{-1} A x = A^T A_s^{-1} b,
/// run through its equivalent form A_s - A_a A_s^{-1} A_a with one Cholesky
/// factorization of A_s reused by every inner solve
/// (inner_solve_count = iterations + 2).
inline SolveReport esd_cgn(const SparseMatrix& a, const DenseVector& b, const DenseVector& x0,
                           const SolveConfig& cfg) {
    cfg.validate();
    if (!a.is_square()) throw NonSquareError("esd_cgn: matrix not square");
    if (b.size() != static_cast<std::size_t>(a.n_rows()) || x0.size() != b.size())
        throw DimensionMismatchError("esd_cgn: dimension mismatch");
    if (!probe_positive_definite(a))
        throw NotPositiveDefiniteError(static_cast<std::size_t>(-1));

    const SymmetricSplit sp = split(a);
    const SpdFactorization f(sp.s);
    const detail::RecordingInnerSolveFn inner = [&f](const DenseVector& q, SolveReport& rep) {
        ++rep.inner_solve_count;
        return f.solve(q);
    };
    return detail::selfdual_cg_core(a, sp, b, x0, cfg, inner);
}

/// Inexact self-dual CG: the esd_cgn recurrence with every A_s-solve
/// replaced by a nested CG run to relative residual `inner_tol` from a zero
/// start. The report's inner_iteration_count totals the nested iterations.
inline SolveReport isd_cgn(const SparseMatrix& a, const DenseVector& b, const DenseVector& x0,
                           double inner_tol, const SolveConfig& cfg) {
    cfg.validate();
    if (!(inner_tol > 0.0 && inner_tol < 1.0))
        throw InvalidParameterError("isd_cgn: inner_tol out of (0,1)");
    if (!a.is_square()) throw NonSquareError("isd_cgn: matrix not square");
    if (b.size() != static_cast<std::size_t>(a.n_rows()) || x0.size() != b.size())
        throw DimensionMismatchError("isd_cgn: dimension mismatch");
    if (!probe_positive_definite(a))
        throw NotPositiveDefiniteError(static_cast<std::size_t>(-1));

    const SymmetricSplit sp = split(a);
    const LinearOperator as_op = LinearOperator::from_matrix(sp.s, true, true);
    SolveConfig icfg;
    icfg.tol = inner_tol;
    icfg.max_iterations = 10 * sp.n + 10;

    const std::size_t n = b.size();
    const detail::RecordingInnerSolveFn inner = [&, n](const DenseVector& q, SolveReport& rep) {
        const SolveReport irep = cg(as_op, q, DenseVector(n, 0.0), icfg);
        ++rep.inner_solve_count;
        rep.inner_iteration_count += static_cast<std::size_t>(irep.iterations);
        rep.matvec_count += irep.matvec_count;
        if (irep.status == SolveStatus::Breakdown)
            throw NotPositiveDefiniteError(static_cast<std::size_t>(-1));
        if (irep.status != SolveStatus::Converged)
            throw InnerSolveFailedError("isd_cgn: nested CG exhausted its iteration budget");
        return irep.solution;
    };
    return detail::selfdual_cg_core(a, sp, b, x0, cfg, inner);
}

/// MINRES on the built A^T M A system; M need not be positive definite.
inline SolveReport sd_minresn(const SparseMatrix& a, const DenseVector& b,
                              const PreconditionerSpec& spec, const SolveConfig& cfg,
                              const InnerMode& inner = InnerMode::exact()) {
    const SelfdualSystem sys = build_selfdual_system(a, b, spec, inner);
    StopCriterion original_stop;
    const StopCriterion* stop = nullptr;
    if (cfg.residual_reference == ResidualReference::OriginalSystem) {
        original_stop.reference = norm2(b);
        original_stop.residual = [&a, &b](const DenseVector& x) {
            DenseVector res = b;
            const DenseVector ax = a.apply(x);
            for (std::size_t i = 0; i < res.size(); ++i) res[i] -= ax[i];
            return norm2(res);
        };
        stop = &original_stop;
    }
    SolveReport rep = minres(sys.op, sys.rhs, DenseVector(b.size(), 0.0), cfg, stop);
    rep.matvec_count = sys.counters->matvecs.load();
    rep.inner_solve_count = sys.counters->inner_solves.load();
    rep.inner_iteration_count = sys.counters->inner_iterations.load();
    DenseVector res = b;
    const DenseVector ax = a.apply(rep.solution);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] -= ax[i];
    const double nb = norm2(b);
    rep.original_relative_residual = nb > 0.0 ? norm2(res) / nb : norm2(res);
    return rep;
}

/// The twice-preconditioned system
///   A_s^{-1} A^T A_s^{-1} A x = (I - (A_s^{-1} A_a)^2) x = A_s^{-1} A^T A_s^{-1} b.
/// The operator is self-adjoint in the A_s inner product, not the Euclidean
/// one; `weight` is the A_s operator to hand to the weighted CG.
struct IteratedSystem {
    LinearOperator op;
    DenseVector rhs;
    LinearOperator weight;
};

inline IteratedSystem iterated_system(const SymmetricSplit& sp, const DenseVector& b) {
    if (b.size() != static_cast<std::size_t>(sp.n))
        throw DimensionMismatchError("iterated_system: rhs length");
    auto f = std::make_shared<SpdFactorization>(sp.s);
    IteratedSystem sys;
    sys.op.dimension = sp.n;
    const SparseMatrix k = sp.k;
    sys.op.apply = [f, k](const DenseVector& x) {
        // (I - (A_s^{-1} A_a)^2) x
        DenseVector t = f->solve(k.apply(f->solve(k.apply(x))));
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = x[i] - t[i];
        return t;
    };
    sys.op.apply_transpose = sys.op.apply;
    sys.op.symmetric = false;  // only A_s-self-adjoint
    sys.weight = LinearOperator::from_matrix(sp.s, true, true);
    DenseVector fb = f->solve(b);
    const DenseVector kfb = f->solve(k.apply(fb));
    sys.rhs.resize(fb.size());
    for (std::size_t i = 0; i < fb.size(); ++i) sys.rhs[i] = fb[i] - kfb[i];
    return sys;
}

/// Value and gradient of the self-dual functional
///   I(x) = 1/2 <Ax,x> + 1/2 <A_s^{-1}(b - A_a x), b - A_a x> - <b,x>,
/// which is nonnegative for positive definite A and vanishes exactly at the
/// solution of Ax=b. The gradient is (A_s - A_a A_s^{-1} A_a) x
/// + A_a A_s^{-1} b - b.
struct FunctionalEvaluation {
    double value = 0.0;
    DenseVector gradient;
};

inline FunctionalEvaluation functional(const SparseMatrix& a, const DenseVector& b,
                                       const DenseVector& x) {
    if (!a.is_square()) throw NonSquareError("functional: matrix not square");
    if (b.size() != static_cast<std::size_t>(a.n_rows()) || x.size() != b.size())
        throw DimensionMismatchError("functional: dimension mismatch");
    const SymmetricSplit sp = split(a);
    const SpdFactorization f(sp.s);
    const std::size_t n = b.size();

    FunctionalEvaluation out;
    const DenseVector ax = a.apply(x);
    DenseVector res = b;  // b - A_a x
    {
        const DenseVector kx = sp.k.apply(x);
        for (std::size_t i = 0; i < n; ++i) res[i] -= kx[i];
    }
    const DenseVector fres = f.solve(res);
    out.value = 0.5 * dot(ax, x) + 0.5 * dot(fres, res) - dot(b, x);

    // gradient = A_s x - A_a A_s^{-1} A_a x + A_a A_s^{-1} b - b
    out.gradient = sp.s.apply(x);
    const DenseVector t = sp.k.apply(f.solve(sp.k.apply(x)));
    const DenseVector u = sp.k.apply(f.solve(b));
    for (std::size_t i = 0; i < n; ++i) out.gradient[i] += -t[i] + u[i] - b[i];
    return out;
}

/// The same functional in its expanded quadratic form
///   1/2 <Atilde x, x> + <A_a A_s^{-1} b - b, x> + 1/2 <A_s^{-1} b, b>;
/// algebraically identical to functional().value, kept as the second route
/// for equivalence checks.
inline double functional_expanded_value(const SparseMatrix& a, const DenseVector& b,
                                        const DenseVector& x) {
    const SymmetricSplit sp = split(a);
    const SpdFactorization f(sp.s);
    const std::size_t n = b.size();
    // Atilde x = A_s x - A_a A_s^{-1} A_a x
    DenseVector atx = sp.s.apply(x);
    {
        const DenseVector t = sp.k.apply(f.solve(sp.k.apply(x)));
        for (std::size_t i = 0; i < n; ++i) atx[i] -= t[i];
    }
    const DenseVector fb = f.solve(b);
    DenseVector lin = sp.k.apply(fb);
    for (std::size_t i = 0; i < n; ++i) lin[i] -= b[i];
    return 0.5 * dot(atx, x) + dot(lin, x) + 0.5 * dot(fb, b);
}

/// General two-matrix splitting A = B + C: the equivalent system
/// (B - C B^{-1} C) x = rhs - C B^{-1} rhs.
struct GeneralSplitSystem {
    LinearOperator op;
    DenseVector rhs;
};

inline GeneralSplitSystem general_split_system(const SparseMatrix& b_mat,
                                               const SparseMatrix& c_mat,
                                               const DenseVector& rhs) {
    std::vector<Triplet> ts;
    for (index_t i = 0; i < b_mat.n_rows(); ++i)
        for (index_t p = b_mat.row_offsets()[i]; p < b_mat.row_offsets()[i + 1]; ++p)
            ts.push_back({i, b_mat.col_indices()[p], b_mat.values()[p]});
    for (index_t i = 0; i < c_mat.n_rows(); ++i)
        for (index_t p = c_mat.row_offsets()[i]; p < c_mat.row_offsets()[i + 1]; ++p)
            ts.push_back({i, c_mat.col_indices()[p], c_mat.values()[p]});
    const SparseMatrix a =
        SparseMatrix::from_triplets(b_mat.n_rows(), b_mat.n_cols(), std::move(ts));
    const SelfdualSystem sys =
        build_selfdual_system(a, rhs, PreconditionerSpec::general_split(b_mat, c_mat));
    return {sys.op, sys.rhs};
}

}  // namespace sdkrylov
