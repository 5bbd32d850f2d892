#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>

#include "sdkrylov/dense.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/random.hpp"
#include "sdkrylov/sparse.hpp"

namespace sdkrylov {

/// A matrix seen only through its action on vectors. The `symmetric` and
/// `positive_definite` flags are advisory; solvers trust them.
struct LinearOperator {
    index_t dimension = 0;
    std::function<DenseVector(const DenseVector&)> apply;
    std::function<DenseVector(const DenseVector&)> apply_transpose;  // optional
    bool symmetric = false;
    bool positive_definite = false;

    static LinearOperator from_matrix(const SparseMatrix& a, bool symmetric = false,
                                      bool positive_definite = false) {
        if (!a.is_square()) throw NonSquareError("LinearOperator: matrix not square");
        LinearOperator op;
        op.dimension = a.n_rows();
        op.apply = [a](const DenseVector& x) { return a.apply(x); };
        op.apply_transpose = [a](const DenseVector& x) { return a.apply(x, true); };
        op.symmetric = symmetric;
        op.positive_definite = positive_definite;
        return op;
    }
};

/// Which residual the relative stopping test refers to.
enum class ResidualReference { TransformedSystem, OriginalSystem };

struct SolveConfig {
    double tol = 1e-6;
    index_t max_iterations = 1000;
    ResidualReference residual_reference = ResidualReference::TransformedSystem;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(tol > 0.0 && tol < 1.0)) throw InvalidParameterError("SolveConfig: tol out of (0,1)");
        if (max_iterations < 1) throw InvalidParameterError("SolveConfig: max_iterations < 1");
    }
};

enum class SolveStatus { Converged, MaxIterations, Breakdown, Stagnated, Diverged };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::Breakdown: return "Breakdown";
        case SolveStatus::Stagnated: return "Stagnated";
        case SolveStatus::Diverged: return "Diverged";
    }
    return "Unknown";
}

/// Outcome of one iterative solve. `iterations` is fractional only for the
/// half-step methods. `residual_history` starts at the initial residual; for
/// whole-step methods iterations == len(residual_history) - 1.
/// `original_relative_residual`, when not NaN, is ||b - A x|| / ||b|| of the
/// untransformed system, recorded at exit for cross-checking.
struct SolveReport {
    DenseVector solution;
    double iterations = 0.0;
    std::vector<double> residual_history;
    SolveStatus status = SolveStatus::MaxIterations;
    std::size_t matvec_count = 0;
    std::size_t inner_solve_count = 0;       // inner-system solve invocations
    std::size_t inner_iteration_count = 0;   // total nested iterations (inexact modes)
    double original_relative_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Symmetry probe: |<Op x, y> - <x, Op y>| <= tol * (|Op x||y| + |x||Op y|)
/// on seeded random vectors.
inline bool probe_symmetric(const LinearOperator& op, double tol = 1e-10, int probes = 4,
                            std::uint64_t seed = 0x5eed) {
    SplitMix64 rng(seed);
    const std::size_t n = static_cast<std::size_t>(op.dimension);
    for (int t = 0; t < probes; ++t) {
        DenseVector x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rng.next_symmetric();
        for (std::size_t i = 0; i < n; ++i) y[i] = rng.next_symmetric();
        const DenseVector ox = op.apply(x), oy = op.apply(y);
        const double lhs = dot(ox, y), rhs = dot(x, oy);
        const double scale = norm2(ox) * norm2(y) + norm2(x) * norm2(oy) + 1e-300;
        if (std::abs(lhs - rhs) > tol * scale) return false;
    }
    return true;
}

/// Positivity probe: <Op x, x> > 0 on seeded random vectors.
inline bool probe_positive_definite(const LinearOperator& op, int probes = 8,
                                    std::uint64_t seed = 0x5eed) {
    SplitMix64 rng(seed);
    const std::size_t n = static_cast<std::size_t>(op.dimension);
    for (int t = 0; t < probes; ++t) {
        DenseVector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rng.next_symmetric();
        if (!(dot(op.apply(x), x) > 0.0)) return false;
    }
    return true;
}

/// Positivity probe straight on a sparse matrix (<A x, x> > 0).
inline bool probe_positive_definite(const SparseMatrix& a, int probes = 8,
                                    std::uint64_t seed = 0x5eed) {
    return probe_positive_definite(LinearOperator::from_matrix(a), probes, seed);
}

}  // namespace sdkrylov
