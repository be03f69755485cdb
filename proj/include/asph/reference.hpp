#ifndef ASPH_REFERENCE_HPP
#define ASPH_REFERENCE_HPP

#include <vector>

#include "operators.hpp"

namespace asph
{
/// Plain serial implementations, written as direct transcriptions of the
/// operator definitions. They share no assembly code with the cached
/// OpenMP operators and exist as the comparison side for tests and the
/// perf tool.
namespace ref
{

template <int D>
NeighborLists<D> brute_force_neighbors(const ParticleSet<D> &ps)
{
    const std::int64_t n = ps.size();
    NeighborLists<D> nl;
    nl.offsets.assign(static_cast<std::size_t>(n + 1), 0);
    for (std::int64_t i = 0; i < n; ++i)
    {
        for (std::int64_t j = 0; j < n; ++j)
        {
            if (j == i)
                continue;
            const Vec<D> r_ij = ps.pos[static_cast<std::size_t>(i)] - ps.pos[static_cast<std::size_t>(j)];
            if (!in_pair_support(ps.smoothing[static_cast<std::size_t>(i)],
                                 ps.smoothing[static_cast<std::size_t>(j)], r_ij))
                continue;
            const KernelSample<D> k = symmetrized_pair(ps.smoothing[static_cast<std::size_t>(i)],
                                                       ps.smoothing[static_cast<std::size_t>(j)], r_ij);
            nl.nbr.push_back(static_cast<std::int32_t>(j));
            nl.r.push_back(r_ij);
            nl.w.push_back(k.value);
            nl.grad.push_back(k.gradient);
        }
        nl.offsets[static_cast<std::size_t>(i + 1)] = static_cast<std::int64_t>(nl.nbr.size());
    }
    return nl;
}

template <int D>
Mat<D> correction_matrix_at(const ParticleSet<D> &ps, const NeighborLists<D> &nl, std::int64_t i)
{
    Mat<D> sum{};
    for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
    {
        const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
        sum += outer(-nl.r[static_cast<std::size_t>(p)], nl.grad[static_cast<std::size_t>(p)]) * ps.vol[j];
    }
    Mat<D> inv;
    if (!invert(sum, inv, 0.0))
        return Mat<D>::identity();
    return inv;
}

template <int D>
std::vector<Vec<D>> corrected_gradient(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                       const std::vector<double> &f)
{
    const std::int64_t n = ps.size();
    std::vector<Vec<D>> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
    {
        const Mat<D> b = correction_matrix_at(ps, nl, i);
        Vec<D> e{};
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            e += transpose_times(b, nl.grad[static_cast<std::size_t>(p)]) *
                 (ps.vol[j] * (f[j] - f[static_cast<std::size_t>(i)]));
        }
        out[static_cast<std::size_t>(i)] = e;
    }
    return out;
}

namespace detail
{

/// Tiny Gauss elimination with full pivoting, independent of linalg.hpp.
template <int N>
inline bool gauss_solve(std::array<double, N * N> a, std::array<double, N> b,
                        std::array<double, N> &x)
{
    std::array<int, N> col{};
    for (int k = 0; k < N; ++k)
        col[static_cast<std::size_t>(k)] = k;
    for (int k = 0; k < N; ++k)
    {
        int pr = k, pc = k;
        double best = 0.0;
        for (int r = k; r < N; ++r)
            for (int c = k; c < N; ++c)
                if (std::abs(a[static_cast<std::size_t>(r * N + c)]) > best)
                {
                    best = std::abs(a[static_cast<std::size_t>(r * N + c)]);
                    pr = r;
                    pc = c;
                }
        if (best == 0.0)
            return false;
        for (int c = 0; c < N; ++c)
            std::swap(a[static_cast<std::size_t>(k * N + c)], a[static_cast<std::size_t>(pr * N + c)]);
        std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(pr)]);
        for (int r = 0; r < N; ++r)
            std::swap(a[static_cast<std::size_t>(r * N + k)], a[static_cast<std::size_t>(r * N + pc)]);
        std::swap(col[static_cast<std::size_t>(k)], col[static_cast<std::size_t>(pc)]);
        for (int r = k + 1; r < N; ++r)
        {
            const double m = a[static_cast<std::size_t>(r * N + k)] / a[static_cast<std::size_t>(k * N + k)];
            for (int c = k; c < N; ++c)
                a[static_cast<std::size_t>(r * N + c)] -= m * a[static_cast<std::size_t>(k * N + c)];
            b[static_cast<std::size_t>(r)] -= m * b[static_cast<std::size_t>(k)];
        }
    }
    std::array<double, N> y{};
    for (int r = N - 1; r >= 0; --r)
    {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < N; ++c)
            s -= a[static_cast<std::size_t>(r * N + c)] * y[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r * N + r)];
    }
    for (int k = 0; k < N; ++k)
        x[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])] = y[static_cast<std::size_t>(k)];
    return true;
}

} // namespace detail

/// Direct per-particle assembly of the second-derivative system, one
/// explicit index at a time. Returns false when the moment matrix is
/// singular (no fallback here, callers assert on non-degenerate stencils).
template <int D>
bool hessian_at(const ParticleSet<D> &ps, const NeighborLists<D> &nl, std::int64_t i,
                const std::vector<double> &f, HessianPacked<D> &h)
{
    static constexpr int P = packed_size<D>;
    const Mat<D> b = correction_matrix_at(ps, nl, i);
    const double fi = f[static_cast<std::size_t>(i)];

    // first-derivative sum and the per-pair monomial gradient sums
    Vec<D> e{};
    std::array<Vec<D>, P> a{};
    for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
    {
        const std::size_t k = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
        const Vec<D> grad = transpose_times(b, nl.grad[static_cast<std::size_t>(p)]) * ps.vol[k];
        const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
        e += grad * (f[k] - fi);
        for (int q = 0; q < P; ++q)
        {
            const auto &mn = PackedPairs<D>::pairs[static_cast<std::size_t>(q)];
            a[static_cast<std::size_t>(q)] += grad * (r[mn[0]] * r[mn[1]]);
        }
    }

    std::array<double, P * P> m{};
    std::array<double, P> rhs{};
    for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
    {
        const std::size_t k = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
        const Vec<D> grad = transpose_times(b, nl.grad[static_cast<std::size_t>(p)]) * ps.vol[k];
        const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
        const double r2 = squared_norm(r);
        const double w = dot(r, grad) / (r2 * r2);
        for (int row = 0; row < P; ++row)
        {
            const auto &mn = PackedPairs<D>::pairs[static_cast<std::size_t>(row)];
            const double s_row = r[mn[0]] * r[mn[1]];
            for (int c = 0; c < P; ++c)
            {
                const auto &kl = PackedPairs<D>::pairs[static_cast<std::size_t>(c)];
                m[static_cast<std::size_t>(row * P + c)] +=
                    w * s_row * (r[kl[0]] * r[kl[1]] + dot(r, a[static_cast<std::size_t>(c)]));
            }
            rhs[static_cast<std::size_t>(row)] += 2.0 * w * s_row * (dot(r, e) - (fi - f[k]));
        }
    }
    return detail::gauss_solve<P>(m, rhs, h);
}

template <int D>
std::vector<double> laplacian(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                              const std::vector<double> &f)
{
    std::vector<double> out(static_cast<std::size_t>(ps.size()), 0.0);
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        HessianPacked<D> h{};
        if (hessian_at(ps, nl, i, f, h))
        {
            double t = 0.0;
            for (int k = 0; k < D; ++k)
                t += h[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(i)] = t;
        }
    }
    return out;
}

template <int D>
std::vector<double> cleary_monaghan(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                    const std::vector<double> &f, double d)
{
    std::vector<double> out(static_cast<std::size_t>(ps.size()), 0.0);
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        double acc = 0.0;
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
            const double rn = norm(r);
            const double dw_dr = dot(r, nl.grad[static_cast<std::size_t>(p)]) / rn;
            acc += ps.vol[j] * (f[static_cast<std::size_t>(i)] - f[j]) / rn * dw_dr;
        }
        out[static_cast<std::size_t>(i)] = 2.0 * d * acc;
    }
    return out;
}

} // namespace ref
} // namespace asph

#endif
