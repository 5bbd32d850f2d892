#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sdkrylov/errors.hpp"

namespace sdkrylov {

using DenseVector = std::vector<double>;

inline double dot(const DenseVector& x, const DenseVector& y) {
    if (x.size() != y.size()) throw DimensionMismatchError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const DenseVector& x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(const DenseVector& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// y += a * x
inline void axpy(double a, const DenseVector& x, DenseVector& y) {
    if (x.size() != y.size()) throw DimensionMismatchError("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline DenseVector scaled(const DenseVector& x, double a) {
    DenseVector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i];
    return y;
}

inline bool all_finite(const DenseVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Row-major dense matrix. Used for test oracles, the dense factorization
/// fallbacks, and the exact spectral paths; never on the hot iteration path.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    DenseVector apply(const DenseVector& x) const {
        if (x.size() != cols_) throw DimensionMismatchError("DenseMatrix::apply");
        DenseVector y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
            y[i] = s;
        }
        return y;
    }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    DenseMatrix multiply(const DenseMatrix& other) const {
        if (cols_ != other.rows_) throw DimensionMismatchError("DenseMatrix::multiply");
        DenseMatrix r(rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < other.cols_; ++j) r(i, j) += a * other(k, j);
            }
        return r;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting; factor once, solve many.
/// Backs the dense solve oracle and the symmetric-indefinite inner solves
/// at desk scale.
class DenseLu {
public:
    explicit DenseLu(DenseMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
        if (lu_.rows() != lu_.cols()) throw NonSquareError("DenseLu: matrix not square");
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best < 1e-300) throw SingularError("DenseLu: pivot below 1e-300 at column " +
                                                   std::to_string(k));
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                lu_(i, k) /= lu_(k, k);
                const double lik = lu_(i, k);
                if (lik == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
            }
        }
    }

    std::size_t dimension() const { return lu_.rows(); }

    DenseVector solve(const DenseVector& b) const {
        const std::size_t n = lu_.rows();
        if (b.size() != n) throw DimensionMismatchError("DenseLu::solve");
        DenseVector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
            x[i] = s / lu_(i, i);
        }
        return x;
    }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Gaussian elimination with partial pivoting; the ground truth for all
/// equivalence tests at desk scale (n <= 2000).
inline DenseVector dense_solve_oracle(const DenseMatrix& a, const DenseVector& b) {
    return DenseLu(a).solve(b);
}

}  // namespace sdkrylov
