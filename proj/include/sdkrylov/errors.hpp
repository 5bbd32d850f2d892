#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdkrylov {

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonSquareError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

/// Thrown when a Cholesky-type factorization hits a non-positive pivot.
/// `pivot_index` is the row (in the original ordering) of the failing pivot.
struct NotPositiveDefiniteError : Error {
    std::size_t pivot_index;
    explicit NotPositiveDefiniteError(std::size_t index)
        : Error("matrix is not positive definite (pivot " + std::to_string(index) + ")"),
          pivot_index(index) {}
};

struct SingularError : Error {
    using Error::Error;
};

struct InvalidParameterError : Error {
    using Error::Error;
};

/// A nested (inner) iterative solve exhausted its iteration budget.
struct InnerSolveFailedError : Error {
    using Error::Error;
};

struct NoConvergenceError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace sdkrylov
