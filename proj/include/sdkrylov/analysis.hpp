#pragma once

#include <cmath>
#include <limits>

#include "sdkrylov/cholesky.hpp"
#include "sdkrylov/eig.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/split.hpp"

namespace sdkrylov {

inline constexpr index_t kDenseAnalysisLimit = 2048;

/// Exact positive-definiteness check (in the non-symmetric sense): A is
/// positive definite iff its symmetric part factors as SPD.
inline bool is_positive_definite(const SparseMatrix& a) {
    if (!a.is_square()) throw NonSquareError("is_positive_definite: matrix not square");
    try {
        SpdFactorization f(split(a).s);
        return true;
    } catch (const NotPositiveDefiniteError&) {
        return false;
    }
}

/// Spectral-norm condition number, dense path: kappa = sqrt of the extreme
/// eigenvalue ratio of A^T A.
inline double condition_number(const SparseMatrix& a) {
    if (!a.is_square()) throw NonSquareError("condition_number: matrix not square");
    if (a.n_rows() > kDenseAnalysisLimit)
        throw InvalidParameterError("condition_number: dense path limited to n <= 2048");
    const DenseMatrix ad = a.to_dense();
    const DenseMatrix ata = ad.transposed().multiply(ad);
    const SymmetricEigen eig = symmetric_eigen(ata);
    const double lo = eig.values.front(), hi = eig.values.back();
    if (!(lo > 0.0)) throw SingularError("condition_number: singular to working precision");
    return std::sqrt(hi / lo);
}

/// Dense self-dual operator A_s - A_a A_s^{-1} A_a, formed column by column.
/// Works for indefinite A_s (LU-backed inverse).
inline DenseMatrix dense_selfdual_matrix(const SymmetricSplit& sp) {
    const std::size_t n = static_cast<std::size_t>(sp.n);
    if (sp.n > kDenseAnalysisLimit)
        throw InvalidParameterError("dense_selfdual_matrix: limited to n <= 2048");
    const DenseLu lu(sp.s.to_dense());
    DenseMatrix out = sp.s.to_dense();
    DenseVector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const DenseVector col = sp.k.apply(lu.solve(sp.k.apply(e)));
        for (std::size_t i = 0; i < n; ++i) out(i, j) -= col[i];
        e[j] = 0.0;
    }
    return out;
}

/// Condition data for a split system: the true spectral condition number of
/// the self-dual operator plus the two a-priori bounds
///   kappa1 = kappa(A_s) + ||A_a||^2 / lambda_min(A_s)^2
///   kappa2 = kappa(A_s) kappa(-A_a^2) + lambda_max(A_s)^2 / lambda_min(-A_a^2)
/// kappa2 is +inf when A_a is singular (always for odd n).
struct ConditionReport {
    double kappa = 0.0;        // kappa of the self-dual operator (sigma ratio)
    double kappa_tilde = 0.0;  // its eigenvalue ratio (equal for SPD input)
    double kappa1_bound = 0.0;
    double kappa2_bound = 0.0;
    double lambda_min_split = 0.0;   // lambda_min(A_s)
    double lambda_max_split = 0.0;   // lambda_max(A_s)
    double lambda_min_tilde = 0.0;   // lambda_min of the self-dual operator
    double norm_skew = 0.0;          // ||A_a||_2
};

inline ConditionReport kappa_bounds(const SymmetricSplit& sp) {
    if (sp.n > kDenseAnalysisLimit)
        throw InvalidParameterError("kappa_bounds: dense path limited to n <= 2048");
    const SymmetricEigen es = symmetric_eigen(sp.s.to_dense());
    const double smin = es.values.front(), smax = es.values.back();
    if (!(smin > 0.0)) throw NotPositiveDefiniteError(0);

    // -A_a^2 = A_a^T A_a, kept in symmetric eigenproblem form
    const DenseMatrix kd = sp.k.to_dense();
    const SymmetricEigen ek = symmetric_eigen(kd.transposed().multiply(kd));
    const double k2min = std::max(ek.values.front(), 0.0);
    const double k2max = std::max(ek.values.back(), 0.0);

    ConditionReport rep;
    rep.lambda_min_split = smin;
    rep.lambda_max_split = smax;
    rep.norm_skew = std::sqrt(k2max);
    const double kappa_s = smax / smin;
    rep.kappa1_bound = kappa_s + k2max / (smin * smin);
    const double tiny = 1e-14 * std::max(k2max, 1e-300);
    rep.kappa2_bound = k2min > tiny
                           ? kappa_s * (k2max / k2min) + smax * smax / k2min
                           : std::numeric_limits<double>::infinity();

    const SymmetricEigen et = symmetric_eigen(dense_selfdual_matrix(sp));
    rep.lambda_min_tilde = et.values.front();
    double abs_min = std::numeric_limits<double>::infinity(), abs_max = 0.0;
    for (double v : et.values) {
        abs_min = std::min(abs_min, std::abs(v));
        abs_max = std::max(abs_max, std::abs(v));
    }
    rep.kappa = abs_max / abs_min;
    rep.kappa_tilde = et.values.back() / et.values.front();
    return rep;
}

/// rho(A_s^{-1} A_a): power iteration on x -> -A_s^{-1} A_a A_s^{-1} A_a x,
/// which is self-adjoint and positive semi-definite in the A_s inner
/// product; the spectral radius is the square root of its top eigenvalue.
inline double spectral_radius_skew(const SymmetricSplit& sp, double rel_tol,
                                   std::uint64_t seed = 0x5eed1) {
    if (sp.k.nnz() == 0) return 0.0;
    const SpdFactorization f(sp.s);
    const std::size_t n = static_cast<std::size_t>(sp.n);
    const auto op = [&](const DenseVector& x) {
        return f.solve(sp.k.apply(f.solve(sp.k.apply(x))));
    };
    const auto as_dot = [&](const DenseVector& x, const DenseVector& y) {
        return dot(sp.s.apply(x), y);
    };

    SplitMix64 rng(seed);
    DenseVector x(n);
    for (double& v : x) v = rng.next_symmetric();
    {
        const double nx = std::sqrt(as_dot(x, x));
        for (double& v : x) v /= nx;
    }
    double lambda_prev = -1.0;
    const index_t cap = 10 * sp.n + 100;
    for (index_t it = 0; it < cap; ++it) {
        DenseVector y = op(x);
        for (double& v : y) v = -v;
        const double lambda = as_dot(y, x);  // Rayleigh quotient, x normalized
        const double ny = std::sqrt(as_dot(y, y));
        if (ny <= 1e-300) return 0.0;
        for (double& v : y) v /= ny;
        x = std::move(y);
        if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) <= rel_tol * std::abs(lambda))
            return std::sqrt(std::max(lambda, 0.0));
        lambda_prev = lambda;
    }
    throw NoConvergenceError("spectral_radius_skew: power iteration cap reached");
}

}  // namespace sdkrylov
