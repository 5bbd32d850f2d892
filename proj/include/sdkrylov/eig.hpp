#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdkrylov/dense.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/operator.hpp"
#include "sdkrylov/random.hpp"
#include "sdkrylov/sparse.hpp"

namespace sdkrylov {

/// Full eigendecomposition of a dense symmetric matrix: Householder
/// tridiagonalization followed by implicit-shift QL (the classical
/// EISPACK tred2/tql2 pair). Eigenvalues come back ascending; column k of
/// `vectors` is the eigenvector of `values[k]`.
struct SymmetricEigen {
    DenseVector values;
    DenseMatrix vectors;
};

inline SymmetricEigen symmetric_eigen(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw NonSquareError("symmetric_eigen: matrix not square");
    const int n = static_cast<int>(a.rows());
    DenseMatrix v = a;
    DenseVector d(n, 0.0), e(n, 0.0);

    // tred2: Householder reduction to tridiagonal form
    for (int j = 0; j < n; ++j) d[j] = v(n - 1, j);
    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;
            for (int j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) v(k, j) -= f * e[k] + g * d[k];
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }
    for (int i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (int k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;

    // tql2: implicit-shift QL on the tridiagonal form
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double f = 0.0, tst1 = 0.0;
    const double eps = std::pow(2.0, -52.0);
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 64) throw NoConvergenceError("symmetric_eigen: QL stalled");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (int k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // sort ascending, carrying vectors along
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        double p = d[i];
        for (int j = i + 1; j < n; ++j)
            if (d[j] < p) {
                k = j;
                p = d[j];
            }
        if (k != i) {
            d[k] = d[i];
            d[i] = p;
            for (int j = 0; j < n; ++j) std::swap(v(j, i), v(j, k));
        }
    }

    SymmetricEigen out;
    out.values = std::move(d);
    out.vectors = std::move(v);
    return out;
}

enum class SpectrumMethod { DenseExact, Lanczos };

struct SpectrumEstimate {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    SpectrumMethod method = SpectrumMethod::DenseExact;
    double rel_tol = 0.0;
    DenseVector vec_min;  // extremal eigenvectors; only on the dense path
    DenseVector vec_max;
};

namespace detail {

/// Lanczos with full reorthogonalization; extremes of the growing
/// tridiagonal matrix are monitored until both stabilize to rel_tol.
inline SpectrumEstimate lanczos_extremes(const SparseMatrix& s, double rel_tol,
                                         std::uint64_t seed = 0x1a9c205) {
    const index_t n = s.n_rows();
    const index_t cap = 10 * n;
    const double beta_floor = 1e-14 * (1.0 + s.norm_inf());
    SplitMix64 rng(seed);
    DenseVector v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.next_symmetric();
    const double nv = norm2(v);
    for (double& x : v) x /= nv;

    std::vector<DenseVector> basis{v};
    DenseVector alphas, betas;
    double prev_min = 0.0, prev_max = 0.0;
    bool have_prev = false;

    for (index_t j = 0; j < cap; ++j) {
        DenseVector w = s.apply(basis.back());
        if (j > 0) axpy(-betas.back(), basis[basis.size() - 2], w);
        const double alpha = dot(w, basis.back());
        alphas.push_back(alpha);
        axpy(-alpha, basis.back(), w);
        for (int pass = 0; pass < 2; ++pass)
            for (const DenseVector& u : basis) axpy(-dot(w, u), u, w);
        const double beta = norm2(w);

        const std::size_t k = alphas.size();
        const bool exhausted = beta <= beta_floor || k == static_cast<std::size_t>(n);
        if (k >= 2 || exhausted) {
            DenseMatrix t(k, k);
            for (std::size_t i = 0; i < k; ++i) {
                t(i, i) = alphas[i];
                if (i + 1 < k) {
                    t(i, i + 1) = betas[i];
                    t(i + 1, i) = betas[i];
                }
            }
            const SymmetricEigen te = symmetric_eigen(t);
            const double cur_min = te.values.front(), cur_max = te.values.back();
            const double floor = 1e-300 +
                                 1e-14 * std::max(std::abs(cur_min), std::abs(cur_max));
            if (have_prev &&
                std::abs(cur_min - prev_min) <= rel_tol * std::abs(cur_min) + floor &&
                std::abs(cur_max - prev_max) <= rel_tol * std::abs(cur_max) + floor) {
                return {cur_min, cur_max, SpectrumMethod::Lanczos, rel_tol, {}, {}};
            }
            if (exhausted) {
                // invariant subspace reached: extremes of T are exact
                return {cur_min, cur_max, SpectrumMethod::Lanczos, rel_tol, {}, {}};
            }
            prev_min = cur_min;
            prev_max = cur_max;
            have_prev = true;
        }
        betas.push_back(beta);
        for (double& x : w) x /= beta;
        basis.push_back(std::move(w));
    }
    throw NoConvergenceError("lanczos_extremes: iteration cap reached");
}

}  // namespace detail

/// Extreme eigenvalues of a symmetric sparse matrix: exact dense solve below
/// `dense_cutoff`, Lanczos with full reorthogonalization above it.
inline SpectrumEstimate extreme_eigs(const SparseMatrix& s, double rel_tol,
                                     index_t dense_cutoff = 2048) {
    if (!s.is_square()) throw NonSquareError("extreme_eigs: matrix not square");
    if (s.n_rows() == 0) throw InvalidParameterError("extreme_eigs: empty matrix");
    if (s.n_rows() <= dense_cutoff) {
        const SymmetricEigen eig = symmetric_eigen(s.to_dense());
        const std::size_t n = eig.values.size();
        SpectrumEstimate out;
        out.lambda_min = eig.values.front();
        out.lambda_max = eig.values.back();
        out.method = SpectrumMethod::DenseExact;
        out.rel_tol = rel_tol;
        out.vec_min.resize(n);
        out.vec_max.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.vec_min[i] = eig.vectors(i, 0);
            out.vec_max[i] = eig.vectors(i, n - 1);
        }
        return out;
    }
    return detail::lanczos_extremes(s, rel_tol);
}

}  // namespace sdkrylov
