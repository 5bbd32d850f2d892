#pragma once

#include <vector>

#include "sdkrylov/errors.hpp"
#include "sdkrylov/sparse.hpp"

namespace sdkrylov {

/// The decomposition A = A_s + A_a into the symmetric part s and the
/// anti-symmetric part k. s is bitwise symmetric and k bitwise
/// anti-symmetric with a zero diagonal; both are canonical CSR.
struct SymmetricSplit {
    SparseMatrix s;
    SparseMatrix k;
    index_t n = 0;
};

/// Split a square matrix into (A + A^T)/2 and (A - A^T)/2 via a
/// transpose-merge pass. Each unordered pair (i,j) contributes the same two
/// summands to s_ij and s_ji, so the stored values are bitwise equal.
inline SymmetricSplit split(const SparseMatrix& a) {
    if (!a.is_square()) throw NonSquareError("split: matrix not square");
    const SparseMatrix at = a.transposed();
    const index_t n = a.n_rows();
    std::vector<Triplet> sym, skew;
    sym.reserve(a.nnz() * 2);
    skew.reserve(a.nnz() * 2);
    for (index_t i = 0; i < n; ++i) {
        index_t p = a.row_offsets()[i], pe = a.row_offsets()[i + 1];
        index_t q = at.row_offsets()[i], qe = at.row_offsets()[i + 1];
        while (p < pe || q < qe) {
            index_t jp = p < pe ? a.col_indices()[p] : n;
            index_t jq = q < qe ? at.col_indices()[q] : n;
            index_t j = std::min(jp, jq);
            const double aij = jp == j ? a.values()[p++] : 0.0;
            const double aji = jq == j ? at.values()[q++] : 0.0;
            const double s = (aij + aji) / 2.0;
            const double k = (aij - aji) / 2.0;
            if (s != 0.0) sym.push_back({i, j, s});
            if (k != 0.0 && i != j) skew.push_back({i, j, k});
        }
    }
    SymmetricSplit out;
    out.s = SparseMatrix::from_triplets(n, n, std::move(sym));
    out.k = SparseMatrix::from_triplets(n, n, std::move(skew));
    out.n = n;
    return out;
}

}  // namespace sdkrylov
