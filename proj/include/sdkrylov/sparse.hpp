#pragma once

#include <algorithm>
#include <cstddef>
#include <tuple>
#include <vector>

#include "sdkrylov/dense.hpp"
#include "sdkrylov/errors.hpp"

namespace sdkrylov {

using index_t = int;

/// One (row, col, value) entry used when assembling a matrix.
struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Compressed sparse row matrix with sorted, duplicate-free columns per row.
/// Symmetric matrices are stored in full (both triangles), so matvec never
/// branches on structure. All instances are immutable after construction.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Canonical constructor from triplets: sorts by (row, col), sums
    /// duplicates, and drops entries that are exactly zero.
    static SparseMatrix from_triplets(index_t n_rows, index_t n_cols,
                                      std::vector<Triplet> entries) {
        validate_shape(n_rows, n_cols);
        for (const Triplet& t : entries)
            if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
                throw InvalidParameterError("from_triplets: entry out of bounds");
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        SparseMatrix m;
        m.n_rows_ = n_rows;
        m.n_cols_ = n_cols;
        m.row_offsets_.assign(static_cast<std::size_t>(n_rows) + 1, 0);
        std::size_t i = 0;
        for (index_t row = 0; row < n_rows; ++row) {
            while (i < entries.size() && entries[i].row == row) {
                index_t col = entries[i].col;
                double sum = 0.0;
                while (i < entries.size() && entries[i].row == row && entries[i].col == col) {
                    sum += entries[i].value;
                    ++i;
                }
                if (sum != 0.0) {
                    m.col_indices_.push_back(col);
                    m.values_.push_back(sum);
                }
            }
            m.row_offsets_[static_cast<std::size_t>(row) + 1] =
                static_cast<index_t>(m.values_.size());
        }
        return m;
    }

    /// Raw CSR constructor; validates the invariants instead of fixing them.
    static SparseMatrix from_csr(index_t n_rows, index_t n_cols, std::vector<index_t> offsets,
                                 std::vector<index_t> cols, std::vector<double> vals) {
        validate_shape(n_rows, n_cols);
        if (offsets.size() != static_cast<std::size_t>(n_rows) + 1 || offsets.front() != 0 ||
            offsets.back() != static_cast<index_t>(vals.size()) || cols.size() != vals.size())
            throw InvalidParameterError("from_csr: inconsistent offsets");
        for (index_t r = 0; r < n_rows; ++r) {
            if (offsets[r] > offsets[r + 1]) throw InvalidParameterError("from_csr: offsets decrease");
            for (index_t p = offsets[r]; p < offsets[r + 1]; ++p) {
                if (cols[p] < 0 || cols[p] >= n_cols)
                    throw InvalidParameterError("from_csr: column out of range");
                if (p > offsets[r] && cols[p - 1] >= cols[p])
                    throw InvalidParameterError("from_csr: columns not strictly increasing");
            }
        }
        SparseMatrix m;
        m.n_rows_ = n_rows;
        m.n_cols_ = n_cols;
        m.row_offsets_ = std::move(offsets);
        m.col_indices_ = std::move(cols);
        m.values_ = std::move(vals);
        return m;
    }

    static SparseMatrix from_dense(const DenseMatrix& d) {
        std::vector<Triplet> ts;
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j)
                if (d(i, j) != 0.0)
                    ts.push_back({static_cast<index_t>(i), static_cast<index_t>(j), d(i, j)});
        return from_triplets(static_cast<index_t>(d.rows()), static_cast<index_t>(d.cols()),
                             std::move(ts));
    }

    static SparseMatrix identity(index_t n) {
        std::vector<Triplet> ts;
        ts.reserve(static_cast<std::size_t>(n));
        for (index_t i = 0; i < n; ++i) ts.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(ts));
    }

    index_t n_rows() const { return n_rows_; }
    index_t n_cols() const { return n_cols_; }
    bool is_square() const { return n_rows_ == n_cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<index_t>& row_offsets() const { return row_offsets_; }
    const std::vector<index_t>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    /// Stored value at (i, j), zero if the position is not stored.
    double at(index_t i, index_t j) const {
        for (index_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
            if (col_indices_[p] == j) return values_[p];
        return 0.0;
    }

    /// y = A x (or A^T x). Summation runs in ascending column order per row,
    /// so results are deterministic.
    DenseVector apply(const DenseVector& x, bool transposed = false) const {
        if (!transposed) {
            if (x.size() != static_cast<std::size_t>(n_cols_))
                throw DimensionMismatchError("matvec: vector length != n_cols");
            DenseVector y(static_cast<std::size_t>(n_rows_), 0.0);
            for (index_t i = 0; i < n_rows_; ++i) {
                double s = 0.0;
                for (index_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
                    s += values_[p] * x[col_indices_[p]];
                y[i] = s;
            }
            return y;
        }
        if (x.size() != static_cast<std::size_t>(n_rows_))
            throw DimensionMismatchError("matvec: vector length != n_rows");
        DenseVector y(static_cast<std::size_t>(n_cols_), 0.0);
        for (index_t i = 0; i < n_rows_; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (index_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
                y[col_indices_[p]] += values_[p] * xi;
        }
        return y;
    }

    SparseMatrix transposed() const {
        std::vector<index_t> counts(static_cast<std::size_t>(n_cols_) + 1, 0);
        for (index_t c : col_indices_) ++counts[static_cast<std::size_t>(c) + 1];
        for (index_t j = 0; j < n_cols_; ++j) counts[j + 1] += counts[j];
        std::vector<index_t> cols(values_.size());
        std::vector<double> vals(values_.size());
        std::vector<index_t> next(counts.begin(), counts.end() - 1);
        for (index_t i = 0; i < n_rows_; ++i)
            for (index_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
                const index_t q = next[col_indices_[p]]++;
                cols[q] = i;
                vals[q] = values_[p];
            }
        return from_csr(n_cols_, n_rows_, std::move(counts), std::move(cols), std::move(vals));
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(static_cast<std::size_t>(n_rows_), static_cast<std::size_t>(n_cols_));
        for (index_t i = 0; i < n_rows_; ++i)
            for (index_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
                d(i, col_indices_[p]) = values_[p];
        return d;
    }

    double norm_inf() const {
        double m = 0.0;
        for (index_t i = 0; i < n_rows_; ++i) {
            double s = 0.0;
            for (index_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
                s += std::abs(values_[p]);
            m = std::max(m, s);
        }
        return m;
    }

    DenseVector diagonal() const {
        const index_t n = std::min(n_rows_, n_cols_);
        DenseVector d(static_cast<std::size_t>(n), 0.0);
        for (index_t i = 0; i < n; ++i) d[i] = at(i, i);
        return d;
    }

private:
    static void validate_shape(index_t n_rows, index_t n_cols) {
        if (n_rows < 0 || n_cols < 0) throw InvalidParameterError("negative matrix dimension");
    }

    index_t n_rows_ = 0;
    index_t n_cols_ = 0;
    std::vector<index_t> row_offsets_{0};
    std::vector<index_t> col_indices_;
    std::vector<double> values_;
};

/// matvec as a free function mirroring the library-wide operation naming.
inline DenseVector matvec(const SparseMatrix& a, const DenseVector& x, bool transposed = false) {
    return a.apply(x, transposed);
}

/// scale * M + shift * I, in canonical CSR form.
inline SparseMatrix add_scaled_identity(const SparseMatrix& m, double scale, double shift) {
    if (!m.is_square()) throw NonSquareError("add_scaled_identity: matrix not square");
    std::vector<Triplet> ts;
    ts.reserve(m.nnz() + static_cast<std::size_t>(m.n_rows()));
    for (index_t i = 0; i < m.n_rows(); ++i)
        for (index_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p)
            ts.push_back({i, m.col_indices()[p], scale * m.values()[p]});
    for (index_t i = 0; i < m.n_rows(); ++i) ts.push_back({i, i, shift});
    return SparseMatrix::from_triplets(m.n_rows(), m.n_cols(), std::move(ts));
}

}  // namespace sdkrylov
