#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sdkrylov/dense.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/sparse.hpp"

namespace sdkrylov {

enum class Ordering { MinimumDegree, Natural };

namespace detail {

/// Greedy minimum-degree ordering on the adjacency graph of a symmetric
/// pattern. Elimination forms a clique among the remaining neighbours;
/// ties break toward the smallest index so the ordering is deterministic.
inline std::vector<index_t> minimum_degree_order(const SparseMatrix& m) {
    const index_t n = m.n_rows();
    std::vector<std::vector<index_t>> adj(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i)
        for (index_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p) {
            const index_t j = m.col_indices()[p];
            if (j != i) adj[i].push_back(j);
        }
    std::vector<bool> alive(static_cast<std::size_t>(n), true);
    std::vector<index_t> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<index_t> merged;
    for (index_t step = 0; step < n; ++step) {
        index_t best = -1;
        std::size_t best_deg = 0;
        for (index_t v = 0; v < n; ++v)
            if (alive[v] && (best < 0 || adj[v].size() < best_deg)) {
                best = v;
                best_deg = adj[v].size();
            }
        alive[best] = false;
        order.push_back(best);
        const std::vector<index_t> nbrs = std::move(adj[best]);
        adj[best].clear();
        for (index_t u : nbrs) {
            // adj[u] := (adj[u] ∪ nbrs) \ {u, best}; lists hold alive nodes only
            merged.clear();
            auto& au = adj[u];
            std::size_t a = 0, b = 0;
            while (a < au.size() || b < nbrs.size()) {
                index_t ca = a < au.size() ? au[a] : n;
                index_t cb = b < nbrs.size() ? nbrs[b] : n;
                index_t c = std::min(ca, cb);
                if (ca == c) ++a;
                if (cb == c) ++b;
                if (c != u && c != best) merged.push_back(c);
            }
            au.assign(merged.begin(), merged.end());
        }
    }
    return order;
}

/// Elimination tree of a symmetric CSR matrix (both triangles stored).
inline std::vector<index_t> elimination_tree(const SparseMatrix& m) {
    const index_t n = m.n_rows();
    std::vector<index_t> parent(static_cast<std::size_t>(n), -1);
    std::vector<index_t> ancestor(static_cast<std::size_t>(n), -1);
    for (index_t k = 0; k < n; ++k)
        for (index_t p = m.row_offsets()[k]; p < m.row_offsets()[k + 1]; ++p) {
            index_t i = m.col_indices()[p];
            while (i != -1 && i < k) {
                const index_t next = ancestor[i];
                ancestor[i] = k;
                if (next == -1) parent[i] = k;
                i = next;
            }
        }
    return parent;
}

/// Nonzero pattern of row k of the Cholesky factor, in topological order.
/// Returns `top`; the pattern is s[top..n-1]. w is the visit-mark workspace.
inline index_t ereach(const SparseMatrix& m, index_t k, const std::vector<index_t>& parent,
                      std::vector<index_t>& s, std::vector<index_t>& w) {
    const index_t n = m.n_rows();
    index_t top = n;
    w[k] = k;
    std::vector<index_t> path;
    for (index_t p = m.row_offsets()[k]; p < m.row_offsets()[k + 1]; ++p) {
        index_t j = m.col_indices()[p];
        if (j >= k) continue;
        path.clear();
        while (w[j] != k) {
            path.push_back(j);
            w[j] = k;
            j = parent[j];
        }
        while (!path.empty()) {
            s[--top] = path.back();
            path.pop_back();
        }
    }
    return top;
}

}  // namespace detail

/// Sparse Cholesky factorization of a symmetric positive definite matrix:
/// P M P^T = L L^T, with a fill-reducing (minimum degree) permutation P.
/// Matrices of dimension <= 64 fall back to a dense factor. Construction
/// throws NotPositiveDefiniteError (carrying the failing pivot's original
/// row index) whenever a pivot is not above 1e-14 times the largest
/// diagonal entry of the input.
class SpdFactorization {
public:
    explicit SpdFactorization(const SparseMatrix& m, Ordering ordering = Ordering::MinimumDegree) {
        if (!m.is_square()) throw NonSquareError("factor_spd: matrix not square");
        n_ = m.n_rows();
        double max_diag = 0.0;
        for (index_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, m.at(i, i));
        pivot_floor_ = 1e-14 * max_diag;
        if (n_ <= 64) {
            factor_dense(m);
        } else {
            factor_sparse(m, ordering);
        }
    }

    index_t dimension() const { return n_; }

    /// x with M x = rhs.
    DenseVector solve(const DenseVector& rhs) const {
        DenseVector z = solve_lower(rhs);
        return solve_lower_transpose(z);
    }

    /// L^{-1} P rhs — the "half" solve used for split preconditioning.
    DenseVector solve_lower(const DenseVector& rhs) const {
        if (rhs.size() != static_cast<std::size_t>(n_))
            throw DimensionMismatchError("solve_lower: wrong length");
        DenseVector z(rhs.size());
        for (index_t i = 0; i < n_; ++i) z[i] = rhs[perm_[i]];
        if (dense_) {
            for (index_t j = 0; j < n_; ++j) {
                z[j] /= dense_l_(j, j);
                for (index_t i = j + 1; i < n_; ++i) z[i] -= dense_l_(i, j) * z[j];
            }
        } else {
            for (index_t j = 0; j < n_; ++j) {
                z[j] /= lx_[lp_[j]];
                for (index_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) z[li_[p]] -= lx_[p] * z[j];
            }
        }
        return z;
    }

    /// P^T L^{-T} z — the adjoint half solve.
    DenseVector solve_lower_transpose(const DenseVector& z_in) const {
        if (z_in.size() != static_cast<std::size_t>(n_))
            throw DimensionMismatchError("solve_lower_transpose: wrong length");
        DenseVector z = z_in;
        if (dense_) {
            for (index_t j = n_; j-- > 0;) {
                for (index_t i = j + 1; i < n_; ++i) z[j] -= dense_l_(i, j) * z[i];
                z[j] /= dense_l_(j, j);
            }
        } else {
            for (index_t j = n_; j-- > 0;) {
                for (index_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) z[j] -= lx_[p] * z[li_[p]];
                z[j] /= lx_[lp_[j]];
            }
        }
        DenseVector x(z.size());
        for (index_t i = 0; i < n_; ++i) x[perm_[i]] = z[i];
        return x;
    }

private:
    void factor_dense(const SparseMatrix& m) {
        dense_ = true;
        perm_.resize(static_cast<std::size_t>(n_));
        for (index_t i = 0; i < n_; ++i) perm_[i] = i;
        dense_l_ = m.to_dense();
        for (index_t k = 0; k < n_; ++k) {
            double d = dense_l_(k, k);
            for (index_t j = 0; j < k; ++j) d -= dense_l_(k, j) * dense_l_(k, j);
            if (!(d > pivot_floor_)) throw NotPositiveDefiniteError(static_cast<std::size_t>(k));
            dense_l_(k, k) = std::sqrt(d);
            for (index_t i = k + 1; i < n_; ++i) {
                double s = dense_l_(i, k);
                for (index_t j = 0; j < k; ++j) s -= dense_l_(i, j) * dense_l_(k, j);
                dense_l_(i, k) = s / dense_l_(k, k);
            }
        }
        for (index_t i = 0; i < n_; ++i)
            for (index_t j = i + 1; j < n_; ++j) dense_l_(i, j) = 0.0;
    }

    void factor_sparse(const SparseMatrix& m, Ordering ordering) {
        perm_ = ordering == Ordering::MinimumDegree ? detail::minimum_degree_order(m)
                                                    : std::vector<index_t>();
        if (perm_.empty()) {
            perm_.resize(static_cast<std::size_t>(n_));
            for (index_t i = 0; i < n_; ++i) perm_[i] = i;
        }
        // permuted matrix P m P^T
        std::vector<index_t> inv(static_cast<std::size_t>(n_));
        for (index_t i = 0; i < n_; ++i) inv[perm_[i]] = i;
        std::vector<Triplet> ts;
        ts.reserve(m.nnz());
        for (index_t i = 0; i < n_; ++i)
            for (index_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p)
                ts.push_back({inv[i], inv[m.col_indices()[p]], m.values()[p]});
        const SparseMatrix pm = SparseMatrix::from_triplets(n_, n_, std::move(ts));

        const std::vector<index_t> parent = detail::elimination_tree(pm);
        std::vector<index_t> s(static_cast<std::size_t>(n_));
        std::vector<index_t> w(static_cast<std::size_t>(n_), -1);

        // symbolic pass: entries per column of L (diagonal included)
        std::vector<index_t> counts(static_cast<std::size_t>(n_), 1);
        for (index_t k = 0; k < n_; ++k) {
            const index_t top = detail::ereach(pm, k, parent, s, w);
            for (index_t t = top; t < n_; ++t) ++counts[s[t]];
        }
        lp_.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (index_t j = 0; j < n_; ++j) lp_[j + 1] = lp_[j] + counts[j];
        li_.resize(static_cast<std::size_t>(lp_[n_]));
        lx_.resize(static_cast<std::size_t>(lp_[n_]));

        // numeric up-looking pass
        std::fill(w.begin(), w.end(), -1);
        std::vector<index_t> next(lp_.begin(), lp_.end() - 1);
        DenseVector x(static_cast<std::size_t>(n_), 0.0);
        for (index_t k = 0; k < n_; ++k) {
            const index_t top = detail::ereach(pm, k, parent, s, w);
            double d = 0.0;
            for (index_t p = pm.row_offsets()[k]; p < pm.row_offsets()[k + 1]; ++p) {
                const index_t j = pm.col_indices()[p];
                if (j < k)
                    x[j] = pm.values()[p];
                else if (j == k)
                    d = pm.values()[p];
            }
            for (index_t t = top; t < n_; ++t) {
                const index_t j = s[t];
                const double lkj = x[j] / lx_[lp_[j]];
                x[j] = 0.0;
                for (index_t p = lp_[j] + 1; p < next[j]; ++p) x[li_[p]] -= lx_[p] * lkj;
                d -= lkj * lkj;
                li_[next[j]] = k;
                lx_[next[j]] = lkj;
                ++next[j];
            }
            if (!(d > pivot_floor_))
                throw NotPositiveDefiniteError(static_cast<std::size_t>(perm_[k]));
            li_[next[k]] = k;
            lx_[next[k]] = std::sqrt(d);
            ++next[k];
        }
    }

    index_t n_ = 0;
    double pivot_floor_ = 0.0;
    bool dense_ = false;
    DenseMatrix dense_l_;
    std::vector<index_t> perm_;   // perm_[permuted] = original
    std::vector<index_t> lp_;     // column pointers of L
    std::vector<index_t> li_;     // row indices, diagonal first per column
    std::vector<double> lx_;
};

/// Factor a symmetric positive definite matrix; see SpdFactorization.
inline SpdFactorization factor_spd(const SparseMatrix& m,
                                   Ordering ordering = Ordering::MinimumDegree) {
    return SpdFactorization(m, ordering);
}

/// y with f's matrix times y equal to rhs.
inline DenseVector solve_with_factor(const SpdFactorization& f, const DenseVector& rhs) {
    return f.solve(rhs);
}

}  // namespace sdkrylov
