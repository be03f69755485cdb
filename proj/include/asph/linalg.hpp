#ifndef ASPH_LINALG_HPP
#define ASPH_LINALG_HPP

#include <array>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "math.hpp"

namespace asph
{

/// Lower-triangular Cholesky factor, L L^T = S. Throws NotPositiveDefinite
/// when a pivot is not strictly positive.
template <int D>
inline Mat<D> cholesky(const Mat<D> &s)
{
    Mat<D> l;
    for (int r = 0; r < D; ++r)
    {
        for (int c = 0; c <= r; ++c)
        {
            double sum = s(r, c);
            for (int k = 0; k < c; ++k)
                sum -= l(r, k) * l(c, k);
            if (r == c)
            {
                if (!(sum > 0.0))
                    throw NotPositiveDefinite("cholesky: pivot <= 0 at row " + std::to_string(r));
                l(r, r) = std::sqrt(sum);
            }
            else
            {
                l(r, c) = sum / l(c, c);
            }
        }
    }
    return l;
}

/// Solve L y = b (forward) then L^T x = y (backward).
template <int D>
inline Vec<D> cholesky_solve(const Mat<D> &l, const Vec<D> &b)
{
    Vec<D> y;
    for (int r = 0; r < D; ++r)
    {
        double s = b[r];
        for (int k = 0; k < r; ++k)
            s -= l(r, k) * y[k];
        y[r] = s / l(r, r);
    }
    Vec<D> x;
    for (int r = D - 1; r >= 0; --r)
    {
        double s = y[r];
        for (int k = r + 1; k < D; ++k)
            s -= l(k, r) * x[k];
        x[r] = s / l(r, r);
    }
    return x;
}

/// Row-major n x n system matrix for the per-particle moment systems,
/// n = 3 (2D) or 6 (3D).
template <int N>
struct DenseMatrix
{
    std::array<double, N * N> a{};

    double &operator()(int r, int c) { return a[static_cast<std::size_t>(r * N + c)]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * N + c)]; }

    static DenseMatrix identity()
    {
        DenseMatrix out;
        for (int k = 0; k < N; ++k)
            out(k, k) = 1.0;
        return out;
    }
};

/// LU with partial pivoting. A pivot below 1e-14 * max|M| declares the
/// system singular (ok = false); callers fall back rather than divide.
template <int N>
struct LuFactors
{
    DenseMatrix<N> lu;
    std::array<int, N> perm{};
    bool ok = false;
};

template <int N>
inline LuFactors<N> lu_factor(const DenseMatrix<N> &m)
{
    LuFactors<N> f;
    f.lu = m;
    double max_abs = 0.0;
    for (double x : m.a)
        max_abs = std::max(max_abs, std::abs(x));
    const double pivot_floor = 1e-14 * max_abs;

    for (int k = 0; k < N; ++k)
        f.perm[static_cast<std::size_t>(k)] = k;

    for (int k = 0; k < N; ++k)
    {
        int piv = k;
        double best = std::abs(f.lu(k, k));
        for (int r = k + 1; r < N; ++r)
        {
            const double v = std::abs(f.lu(r, k));
            if (v > best)
            {
                best = v;
                piv = r;
            }
        }
        if (!(best > pivot_floor))
            return f; // singular
        if (piv != k)
        {
            for (int c = 0; c < N; ++c)
                std::swap(f.lu(k, c), f.lu(piv, c));
            std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(piv)]);
        }
        const double inv_piv = 1.0 / f.lu(k, k);
        for (int r = k + 1; r < N; ++r)
        {
            const double mult = f.lu(r, k) * inv_piv;
            f.lu(r, k) = mult;
            for (int c = k + 1; c < N; ++c)
                f.lu(r, c) -= mult * f.lu(k, c);
        }
    }
    f.ok = true;
    return f;
}

template <int N>
inline void lu_solve(const LuFactors<N> &f, const std::array<double, N> &b,
                     std::array<double, N> &x)
{
    std::array<double, N> y{};
    for (int r = 0; r < N; ++r)
    {
        double s = b[static_cast<std::size_t>(f.perm[static_cast<std::size_t>(r)])];
        for (int k = 0; k < r; ++k)
            s -= f.lu(r, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(r)] = s;
    }
    for (int r = N - 1; r >= 0; --r)
    {
        double s = y[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < N; ++k)
            s -= f.lu(r, k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(r)] = s / f.lu(r, r);
    }
}

template <int N>
inline bool lu_inverse(const LuFactors<N> &f, std::array<double, N * N> &inv)
{
    if (!f.ok)
        return false;
    std::array<double, N> e{};
    std::array<double, N> col{};
    for (int c = 0; c < N; ++c)
    {
        e.fill(0.0);
        e[static_cast<std::size_t>(c)] = 1.0;
        lu_solve<N>(f, e, col);
        for (int r = 0; r < N; ++r)
            inv[static_cast<std::size_t>(r * N + c)] = col[static_cast<std::size_t>(r)];
    }
    return true;
}

template <int N>
inline double one_norm(const std::array<double, N * N> &a)
{
    double best = 0.0;
    for (int c = 0; c < N; ++c)
    {
        double s = 0.0;
        for (int r = 0; r < N; ++r)
            s += std::abs(a[static_cast<std::size_t>(r * N + c)]);
        best = std::max(best, s);
    }
    return best;
}

/// kappa_1(M) = ||M||_1 ||M^-1||_1. For n <= 6 the inverse is cheap, so the
/// estimate is exact; +infinity for singular input.
template <int N>
inline double condition_estimate(const DenseMatrix<N> &m)
{
    const LuFactors<N> f = lu_factor(m);
    std::array<double, N * N> inv{};
    if (!lu_inverse(f, inv))
        return std::numeric_limits<double>::infinity();
    return one_norm<N>(m.a) * one_norm<N>(inv);
}

template <int N>
struct SolveResult
{
    std::array<double, N> x{};
    double condition = 0.0;
};

/// Pivoted Gaussian elimination with one step of iterative refinement.
/// Throws SingularSystem on a vanishing pivot.
template <int N>
inline SolveResult<N> solve_dense(const DenseMatrix<N> &m, const std::array<double, N> &b)
{
    const LuFactors<N> f = lu_factor(m);
    if (!f.ok)
        throw SingularSystem("solve_dense: pivot below 1e-14 * max|M|");

    SolveResult<N> out;
    lu_solve<N>(f, b, out.x);

    // one refinement pass keeps the residual near roundoff for kappa <= 1e8
    std::array<double, N> resid{};
    for (int r = 0; r < N; ++r)
    {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = 0; c < N; ++c)
            s -= m(r, c) * out.x[static_cast<std::size_t>(c)];
        resid[static_cast<std::size_t>(r)] = s;
    }
    std::array<double, N> delta{};
    lu_solve<N>(f, resid, delta);
    for (int r = 0; r < N; ++r)
        out.x[static_cast<std::size_t>(r)] += delta[static_cast<std::size_t>(r)];

    std::array<double, N * N> inv{};
    lu_inverse(f, inv);
    out.condition = one_norm<N>(m.a) * one_norm<N>(inv);
    return out;
}

} // namespace asph

#endif
