#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sdkrylov/dense.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/sparse.hpp"

namespace sdkrylov {

namespace detail {

/// Shortest-roundtrip decimal formatting: 17 significant digits always
/// reproduce the exact double on read.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Write in Matrix Market coordinate format (real, general, 1-based),
/// entries in row-major order.
inline void write_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.n_rows() << " " << m.n_cols() << " " << m.nnz() << "\n";
    for (index_t i = 0; i < m.n_rows(); ++i)
        for (index_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p)
            out << (i + 1) << " " << (m.col_indices()[p] + 1) << " "
                << detail::format_double(m.values()[p]) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

/// Read Matrix Market coordinate files. Indices are 1-based as the format
/// defines; general and symmetric storage are accepted (symmetric entries
/// are mirrored).
inline SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("%%MatrixMarket", 0) != 0)
        throw IoError("not a MatrixMarket file: " + path);
    std::istringstream hs(header);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer"))
        throw IoError("unsupported MatrixMarket header in " + path);
    if (symmetry != "general" && symmetry != "symmetric")
        throw IoError("unsupported MatrixMarket symmetry '" + symmetry + "' in " + path);

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    long long rows = 0, cols = 0, nnz = 0;
    if (!(sizes >> rows >> cols >> nnz)) throw IoError("bad size line in " + path);

    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw IoError("truncated entry list in " + path);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw IoError("entry out of bounds in " + path);
        ts.push_back({static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v});
        if (symmetry == "symmetric" && i != j)
            ts.push_back({static_cast<index_t>(j - 1), static_cast<index_t>(i - 1), v});
    }
    return SparseMatrix::from_triplets(static_cast<index_t>(rows), static_cast<index_t>(cols),
                                       std::move(ts));
}

/// Plain-text vector: one value per line.
inline void write_vector(const DenseVector& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (double x : v) out << detail::format_double(x) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

inline DenseVector read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    DenseVector v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double x = 0.0;
        if (!(ls >> x)) throw IoError("bad vector entry in " + path);
        v.push_back(x);
    }
    return v;
}

}  // namespace sdkrylov
