#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "sdkrylov/eig.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/random.hpp"
#include "sdkrylov/sparse.hpp"

namespace sdkrylov {

enum class Scheme { Backward, Centered };

inline const char* to_string(Scheme s) {
    return s == Scheme::Backward ? "backward" : "centered";
}

/// Choice of the exact grid solution a generated system is built around.
/// The right-hand side is always b = A * x_exact, so x_exact is the exact
/// discrete solution and solver error is directly measurable. Random
/// solutions draw uniform [0,1) entries from SplitMix64(seed).
struct SolutionChoice {
    enum class Kind { XSinPiX, XOneMinusXOverCosX, SinSinExp, Random };
    Kind kind = Kind::Random;
    std::uint64_t seed = 0;

    static SolutionChoice x_sin_pi_x() { return {Kind::XSinPiX, 0}; }
    static SolutionChoice x_one_minus_x_over_cos_x() { return {Kind::XOneMinusXOverCosX, 0}; }
    static SolutionChoice sin_sin_exp() { return {Kind::SinSinExp, 0}; }
    static SolutionChoice random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

/// A generated benchmark system. When `scaled` is set the equations were
/// multiplied through by h^2 during assembly (entries O(1), default); the
/// relative-residual iteration counts of the scale-invariant preconditioner
/// parameterizations are unaffected.
struct DiscretizedSystem {
    SparseMatrix a;
    DenseVector b;
    std::optional<DenseVector> x_exact;
    double h = 0.0;
    index_t n = 0;
    Scheme scheme = Scheme::Backward;
    bool scaled = true;
    std::string description;
};

namespace detail {

inline DenseVector random_solution(index_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DenseVector x(static_cast<std::size_t>(n));
    for (double& v : x) v = rng.next_unit();
    return x;
}

inline index_t integer_sqrt(index_t n) {
    index_t m = static_cast<index_t>(std::llround(std::sqrt(static_cast<double>(n))));
    while (m * m > n) --m;
    while ((m + 1) * (m + 1) <= n) ++m;
    return m;
}

}  // namespace detail

/// 1D convection-diffusion -eps y'' + y' = f on (0,1), zero Dirichlet ends,
/// backward difference for y'. h = 1/(n+1); n interior unknowns.
inline DiscretizedSystem gen_ode1d(double eps, index_t n, const SolutionChoice& solution,
                                   bool scale_h2 = true) {
    if (!(eps > 0.0)) throw InvalidParameterError("gen_ode1d: eps must be positive");
    if (n < 2) throw InvalidParameterError("gen_ode1d: need n >= 2");
    const double h = 1.0 / static_cast<double>(n + 1);
    const double s = scale_h2 ? h * h : 1.0;
    const double diag = s * (2.0 * eps / (h * h) + 1.0 / h);
    const double super = s * (-eps / (h * h));
    const double sub = s * (-eps / (h * h) - 1.0 / h);
    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(3 * n));
    for (index_t i = 0; i < n; ++i) {
        if (i > 0) ts.push_back({i, i - 1, sub});
        ts.push_back({i, i, diag});
        if (i + 1 < n) ts.push_back({i, i + 1, super});
    }
    DiscretizedSystem sys;
    sys.a = SparseMatrix::from_triplets(n, n, std::move(ts));
    sys.h = h;
    sys.n = n;
    sys.scaled = scale_h2;

    DenseVector x(static_cast<std::size_t>(n));
    switch (solution.kind) {
        case SolutionChoice::Kind::XSinPiX:
            for (index_t i = 0; i < n; ++i) {
                const double xi = static_cast<double>(i + 1) * h;
                x[i] = xi * std::sin(M_PI * xi);
            }
            sys.description = "ode1d eps=" + std::to_string(eps) + " x*sin(pi x)";
            break;
        case SolutionChoice::Kind::XOneMinusXOverCosX:
            for (index_t i = 0; i < n; ++i) {
                const double xi = static_cast<double>(i + 1) * h;
                x[i] = xi * (1.0 - xi) / std::cos(xi);
            }
            sys.description = "ode1d eps=" + std::to_string(eps) + " x(1-x)/cos(x)";
            break;
        case SolutionChoice::Kind::Random:
            x = detail::random_solution(n, solution.seed);
            sys.description = "ode1d eps=" + std::to_string(eps) + " random";
            break;
        default:
            throw InvalidParameterError("gen_ode1d: solution formula not one-dimensional");
    }
    sys.b = sys.a.apply(x);
    sys.x_exact = std::move(x);
    return sys;
}

/// 2D constant convection -Lap u + a du/dx = f on the unit square, zero
/// Dirichlet boundary, 5-point Laplacian, backward or centered convection.
/// n must be a perfect square (m x m interior grid, h = 1/(m+1)); rows run
/// lexicographically with x fastest.
inline DiscretizedSystem gen_pde_convection(double a_coef, index_t n, Scheme scheme,
                                            const SolutionChoice& solution,
                                            bool scale_h2 = true) {
    const index_t m = detail::integer_sqrt(n);
    if (m * m != n || m < 1)
        throw InvalidParameterError("gen_pde_convection: n must be a perfect square");
    const double h = 1.0 / static_cast<double>(m + 1);
    const double s = scale_h2 ? h * h : 1.0;
    const double lap = s * (-1.0 / (h * h));
    double diag = s * (4.0 / (h * h));
    double west = lap, east = lap;
    if (scheme == Scheme::Backward) {
        diag += s * (a_coef / h);
        west += s * (-a_coef / h);
    } else {
        east += s * (a_coef / (2.0 * h));
        west += s * (-a_coef / (2.0 * h));
    }
    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(5 * n));
    for (index_t j = 0; j < m; ++j)
        for (index_t i = 0; i < m; ++i) {
            const index_t row = j * m + i;
            if (j > 0) ts.push_back({row, row - m, lap});
            if (i > 0) ts.push_back({row, row - 1, west});
            ts.push_back({row, row, diag});
            if (i + 1 < m) ts.push_back({row, row + 1, east});
            if (j + 1 < m) ts.push_back({row, row + m, lap});
        }
    DiscretizedSystem sys;
    sys.a = SparseMatrix::from_triplets(n, n, std::move(ts));
    sys.h = h;
    sys.n = n;
    sys.scheme = scheme;
    sys.scaled = scale_h2;

    DenseVector x(static_cast<std::size_t>(n));
    switch (solution.kind) {
        case SolutionChoice::Kind::SinSinExp:
            for (index_t j = 0; j < m; ++j)
                for (index_t i = 0; i < m; ++i) {
                    const double xi = static_cast<double>(i + 1) * h;
                    const double yj = static_cast<double>(j + 1) * h;
                    const double c = xi / 2.0 + yj;
                    x[j * m + i] = std::sin(M_PI * xi) * std::sin(M_PI * yj) * std::exp(c * c * c);
                }
            sys.description = "pde-conv a=" + std::to_string(a_coef) + " " +
                              to_string(scheme) + " manufactured";
            break;
        case SolutionChoice::Kind::Random:
            x = detail::random_solution(n, solution.seed);
            sys.description =
                "pde-conv a=" + std::to_string(a_coef) + " " + to_string(scheme) + " random";
            break;
        default:
            throw InvalidParameterError("gen_pde_convection: solution formula not two-dimensional");
    }
    sys.b = sys.a.apply(x);
    sys.x_exact = std::move(x);
    return sys;
}

/// Variable-coefficient convection with g(x,y) = 10 exp(3.5(x^2+y^2)):
/// -Lap u + d(g u)/dx + g du/dx + reaction*u = f, backward differences for
/// both first-order terms, the divergence term acting on the nodal product
/// g*u. reaction = 0 keeps the system positive definite; reaction = -200
/// makes it indefinite.
inline DiscretizedSystem gen_pde_varcoef(index_t n, double reaction,
                                         const SolutionChoice& solution, bool scale_h2 = true) {
    const index_t m = detail::integer_sqrt(n);
    if (m * m != n || m < 1)
        throw InvalidParameterError("gen_pde_varcoef: n must be a perfect square");
    const double h = 1.0 / static_cast<double>(m + 1);
    const double s = scale_h2 ? h * h : 1.0;
    const double lap = s * (-1.0 / (h * h));
    const auto g = [](double x, double y) { return 10.0 * std::exp(3.5 * (x * x + y * y)); };
    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(5 * n));
    for (index_t j = 0; j < m; ++j)
        for (index_t i = 0; i < m; ++i) {
            const index_t row = j * m + i;
            const double xi = static_cast<double>(i + 1) * h;
            const double yj = static_cast<double>(j + 1) * h;
            const double gij = g(xi, yj);
            const double gw = g(xi - h, yj);
            const double diag = s * (4.0 / (h * h) + 2.0 * gij / h + reaction);
            const double west = s * (-1.0 / (h * h) - (gw + gij) / h);
            if (j > 0) ts.push_back({row, row - m, lap});
            if (i > 0) ts.push_back({row, row - 1, west});
            ts.push_back({row, row, diag});
            if (i + 1 < m) ts.push_back({row, row + 1, lap});
            if (j + 1 < m) ts.push_back({row, row + m, lap});
        }
    DiscretizedSystem sys;
    sys.a = SparseMatrix::from_triplets(n, n, std::move(ts));
    sys.h = h;
    sys.n = n;
    sys.scheme = Scheme::Backward;
    sys.scaled = scale_h2;

    DenseVector x(static_cast<std::size_t>(n));
    switch (solution.kind) {
        case SolutionChoice::Kind::SinSinExp:
            for (index_t j = 0; j < m; ++j)
                for (index_t i = 0; i < m; ++i) {
                    const double xi = static_cast<double>(i + 1) * h;
                    const double yj = static_cast<double>(j + 1) * h;
                    const double c = xi / 2.0 + yj;
                    x[j * m + i] = std::sin(M_PI * xi) * std::sin(M_PI * yj) * std::exp(c * c * c);
                }
            sys.description = "pde-varcoef reaction=" + std::to_string(reaction) + " manufactured";
            break;
        case SolutionChoice::Kind::Random:
            x = detail::random_solution(n, solution.seed);
            sys.description = "pde-varcoef reaction=" + std::to_string(reaction) + " random";
            break;
        default:
            throw InvalidParameterError("gen_pde_varcoef: solution formula not two-dimensional");
    }
    sys.b = sys.a.apply(x);
    sys.x_exact = std::move(x);
    return sys;
}

/// The 2x2 ill-conditioned family [[1,-1],[1,-1+eps]] whose self-dual
/// operator is diag(eps/(eps-1), eps).
inline SparseMatrix example22_lower(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameterError("example22: eps in (0,1)");
    return SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, 1.0},
                                              {1, 1, -1.0 + eps}});
}

/// The upper variant [[1,-1+eps],[1,-1]].
inline SparseMatrix example22_upper(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameterError("example22: eps in (0,1)");
    return SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, -1.0 + eps}, {1, 0, 1.0},
                                              {1, 1, -1.0}});
}

/// A_s + (1/eps) J with J the block-diagonal symplectic matrix (J^2 = -I).
/// seed == 0 gives the A_s = I branch; otherwise A_s is a seeded random
/// symmetric matrix shifted so lambda_min >= 0.1.
inline SparseMatrix symplectic_family(index_t n, double eps, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0) throw InvalidParameterError("symplectic_family: n must be even");
    if (!(eps > 0.0)) throw InvalidParameterError("symplectic_family: eps must be positive");
    DenseMatrix as(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    if (seed == 0) {
        for (index_t i = 0; i < n; ++i) as(i, i) = 1.0;
    } else {
        SplitMix64 rng(seed);
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i; j < n; ++j) {
                const double v = rng.next_symmetric();
                as(i, j) = v;
                as(j, i) = v;
            }
        const SymmetricEigen eig = symmetric_eigen(as);
        const double shift = 0.1 - eig.values.front();
        if (shift > 0.0)
            for (index_t i = 0; i < n; ++i) as(i, i) += shift;
    }
    std::vector<Triplet> ts;
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j)
            if (as(i, j) != 0.0) ts.push_back({i, j, as(i, j)});
    for (index_t p = 0; p < n; p += 2) {
        ts.push_back({p, p + 1, -1.0 / eps});
        ts.push_back({p + 1, p, 1.0 / eps});
    }
    return SparseMatrix::from_triplets(n, n, std::move(ts));
}

}  // namespace sdkrylov
