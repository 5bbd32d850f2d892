#pragma once

#include <cmath>

#include "sdkrylov/cg.hpp"
#include "sdkrylov/operator.hpp"

namespace sdkrylov {

/// MINRES (Paige & Saunders) for symmetric, possibly indefinite operators.
/// The residual history is the recurrence estimate phibar, which equals
/// ||b - A x_k|| and is non-increasing by construction (an external `stop`
/// rule replaces both the history and the test). A Lanczos beta of zero
/// with the residual still above tolerance is reported as Breakdown; with
/// the residual below tolerance it is ordinary convergence.
inline SolveReport minres(const LinearOperator& op, const DenseVector& b, const DenseVector& x0,
                          const SolveConfig& cfg, const StopCriterion* stop = nullptr) {
    cfg.validate();
    if (!op.symmetric) throw InvalidParameterError("minres: operator not flagged symmetric");
    if (b.size() != static_cast<std::size_t>(op.dimension) || x0.size() != b.size())
        throw DimensionMismatchError("minres: dimension mismatch");

    const std::size_t n = b.size();
    SolveReport rep;
    rep.solution = x0;
    DenseVector r1 = b;
    {
        DenseVector ax = op.apply(rep.solution);
        ++rep.matvec_count;
        for (std::size_t i = 0; i < n; ++i) r1[i] -= ax[i];
    }
    const double beta1 = norm2(r1);
    const double ref = stop ? stop->reference : norm2(b);
    rep.residual_history.push_back(stop ? stop->residual(rep.solution) : beta1);
    if (rep.residual_history.back() <= cfg.tol * ref || beta1 == 0.0) {
        rep.status = SolveStatus::Converged;
        return rep;
    }

    DenseVector r2 = r1;
    DenseVector w(n, 0.0), w1(n, 0.0), w2(n, 0.0), v(n, 0.0);
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
    double phibar = beta1, cs = -1.0, sn = 0.0;

    for (index_t itn = 1; itn <= cfg.max_iterations; ++itn) {
        const double s = 1.0 / beta;
        for (std::size_t i = 0; i < n; ++i) v[i] = s * r2[i];
        DenseVector y = op.apply(v);
        ++rep.matvec_count;
        if (itn >= 2) axpy(-beta / oldb, r1, y);
        const double alfa = dot(v, y);
        axpy(-alfa / beta, r2, y);
        r1 = r2;
        r2 = y;
        oldb = beta;
        beta = norm2(r2);

        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        double gamma = std::hypot(gbar, beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        for (std::size_t i = 0; i < n; ++i)
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
        axpy(phi, w, rep.solution);

        rep.residual_history.push_back(stop ? stop->residual(rep.solution) : phibar);
        rep.iterations = static_cast<double>(itn);
        if (rep.residual_history.back() <= cfg.tol * ref) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        if (beta == 0.0) {
            rep.status = SolveStatus::Breakdown;
            return rep;
        }
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

}  // namespace sdkrylov
