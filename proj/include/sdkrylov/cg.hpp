#pragma once

#include "sdkrylov/operator.hpp"

namespace sdkrylov {

/// Optional external stopping rule for the symmetric kernels: `residual(x)`
/// returns the absolute residual norm of some reference system (typically
/// the untransformed one) and iteration stops when it drops to
/// tol * reference. The residual history then records these values.
struct StopCriterion {
    std::function<double(const DenseVector&)> residual;
    double reference = 1.0;
};

/// Conjugate gradients on a symmetric positive definite operator. Stops when
/// ||r_k|| / ||b|| <= tol (norms in the weight inner product when `weight` is
/// given, in which case the operator need only be self-adjoint under it),
/// or on `stop` when provided. Breakdown is reported when <p, Op p> <= 0,
/// the caller's cue that the operator is indefinite and MINRES should be
/// used instead.
inline SolveReport cg(const LinearOperator& op, const DenseVector& b, const DenseVector& x0,
                      const SolveConfig& cfg, const LinearOperator* weight = nullptr,
                      const StopCriterion* stop = nullptr) {
    cfg.validate();
    if (!weight && !op.symmetric) throw InvalidParameterError("cg: operator not flagged symmetric");
    if (b.size() != static_cast<std::size_t>(op.dimension) || x0.size() != b.size())
        throw DimensionMismatchError("cg: dimension mismatch");

    const auto wdot = [&](const DenseVector& u, const DenseVector& v) {
        return weight ? dot(weight->apply(u), v) : dot(u, v);
    };

    SolveReport rep;
    rep.solution = x0;
    DenseVector r = b;
    {
        DenseVector ax = op.apply(rep.solution);
        ++rep.matvec_count;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
    }
    const double ref = stop ? stop->reference : std::sqrt(wdot(b, b));
    double rr = wdot(r, r);
    rep.residual_history.push_back(stop ? stop->residual(rep.solution) : std::sqrt(rr));
    if (rep.residual_history.back() <= cfg.tol * ref) {
        rep.status = SolveStatus::Converged;
        return rep;
    }
    DenseVector p = r;
    for (index_t k = 1; k <= cfg.max_iterations; ++k) {
        DenseVector w = op.apply(p);
        ++rep.matvec_count;
        const double pw = wdot(p, w);
        if (!(pw > 0.0)) {
            rep.status = SolveStatus::Breakdown;
            rep.iterations = static_cast<double>(k - 1);
            return rep;
        }
        const double alpha = rr / pw;
        axpy(alpha, p, rep.solution);
        axpy(-alpha, w, r);
        const double rr_new = wdot(r, r);
        rep.residual_history.push_back(stop ? stop->residual(rep.solution) : std::sqrt(rr_new));
        rep.iterations = static_cast<double>(k);
        if (rep.residual_history.back() <= cfg.tol * ref) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

}  // namespace sdkrylov
