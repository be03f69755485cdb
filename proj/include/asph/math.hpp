#ifndef ASPH_MATH_HPP
#define ASPH_MATH_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace asph
{

/// Spatial vector, dim in {1,2,3}.
template <int D>
struct Vec
{
    std::array<double, D> v{};

    double &operator[](int k) { return v[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return v[static_cast<std::size_t>(k)]; }

    Vec &operator+=(const Vec &o)
    {
        for (int k = 0; k < D; ++k)
            v[k] += o.v[k];
        return *this;
    }
    Vec &operator-=(const Vec &o)
    {
        for (int k = 0; k < D; ++k)
            v[k] -= o.v[k];
        return *this;
    }
    Vec &operator*=(double s)
    {
        for (int k = 0; k < D; ++k)
            v[k] *= s;
        return *this;
    }
};

template <int D>
inline Vec<D> operator+(Vec<D> a, const Vec<D> &b) { return a += b; }
template <int D>
inline Vec<D> operator-(Vec<D> a, const Vec<D> &b) { return a -= b; }
template <int D>
inline Vec<D> operator*(Vec<D> a, double s) { return a *= s; }
template <int D>
inline Vec<D> operator*(double s, Vec<D> a) { return a *= s; }
template <int D>
inline Vec<D> operator-(Vec<D> a)
{
    for (int k = 0; k < D; ++k)
        a.v[k] = -a.v[k];
    return a;
}

template <int D>
inline double dot(const Vec<D> &a, const Vec<D> &b)
{
    double s = 0.0;
    for (int k = 0; k < D; ++k)
        s += a.v[k] * b.v[k];
    return s;
}

template <int D>
inline double squared_norm(const Vec<D> &a) { return dot(a, a); }

template <int D>
inline double norm(const Vec<D> &a) { return std::sqrt(squared_norm(a)); }

/// Small dense dim x dim matrix, row-major.
template <int D>
struct Mat
{
    std::array<double, D * D> m{};

    double &operator()(int r, int c) { return m[static_cast<std::size_t>(r * D + c)]; }
    double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * D + c)]; }

    static Mat identity()
    {
        Mat out;
        for (int k = 0; k < D; ++k)
            out(k, k) = 1.0;
        return out;
    }

    Mat &operator+=(const Mat &o)
    {
        for (std::size_t k = 0; k < m.size(); ++k)
            m[k] += o.m[k];
        return *this;
    }
    Mat &operator*=(double s)
    {
        for (double &x : m)
            x *= s;
        return *this;
    }
};

template <int D>
inline Mat<D> operator*(Mat<D> a, double s) { return a *= s; }

template <int D>
inline Vec<D> operator*(const Mat<D> &a, const Vec<D> &x)
{
    Vec<D> y;
    for (int r = 0; r < D; ++r)
    {
        double s = 0.0;
        for (int c = 0; c < D; ++c)
            s += a(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

/// y = a^T x
template <int D>
inline Vec<D> transpose_times(const Mat<D> &a, const Vec<D> &x)
{
    Vec<D> y;
    for (int c = 0; c < D; ++c)
    {
        double s = 0.0;
        for (int r = 0; r < D; ++r)
            s += a(r, c) * x[r];
        y[c] = s;
    }
    return y;
}

template <int D>
inline Mat<D> operator*(const Mat<D> &a, const Mat<D> &b)
{
    Mat<D> out;
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c)
        {
            double s = 0.0;
            for (int k = 0; k < D; ++k)
                s += a(r, k) * b(k, c);
            out(r, c) = s;
        }
    return out;
}

template <int D>
inline Mat<D> transpose(const Mat<D> &a)
{
    Mat<D> out;
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c)
            out(r, c) = a(c, r);
    return out;
}

/// a b^T
template <int D>
inline Mat<D> outer(const Vec<D> &a, const Vec<D> &b)
{
    Mat<D> out;
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c)
            out(r, c) = a[r] * b[c];
    return out;
}

template <int D>
inline double trace(const Mat<D> &a)
{
    double s = 0.0;
    for (int k = 0; k < D; ++k)
        s += a(k, k);
    return s;
}

inline double det(const Mat<1> &a) { return a(0, 0); }

inline double det(const Mat<2> &a)
{
    return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
}

inline double det(const Mat<3> &a)
{
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Adjugate-based inverse for dim <= 3. Returns false when |det| <= det_floor.
inline bool invert(const Mat<1> &a, Mat<1> &out, double det_floor = 0.0)
{
    const double d = det(a);
    if (!(std::abs(d) > det_floor))
        return false;
    out(0, 0) = 1.0 / d;
    return true;
}

inline bool invert(const Mat<2> &a, Mat<2> &out, double det_floor = 0.0)
{
    const double d = det(a);
    if (!(std::abs(d) > det_floor))
        return false;
    const double inv = 1.0 / d;
    out(0, 0) = a(1, 1) * inv;
    out(0, 1) = -a(0, 1) * inv;
    out(1, 0) = -a(1, 0) * inv;
    out(1, 1) = a(0, 0) * inv;
    return true;
}

inline bool invert(const Mat<3> &a, Mat<3> &out, double det_floor = 0.0)
{
    const double d = det(a);
    if (!(std::abs(d) > det_floor))
        return false;
    const double inv = 1.0 / d;
    out(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) * inv;
    out(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) * inv;
    out(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) * inv;
    out(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) * inv;
    out(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) * inv;
    out(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) * inv;
    out(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) * inv;
    out(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) * inv;
    out(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) * inv;
    return true;
}

/// Eigenvalues of a symmetric matrix, ascending. Closed forms (2x2 direct,
/// 3x3 trigonometric); used for semi-axis recovery, never in hot loops.
inline std::array<double, 1> symmetric_eigenvalues(const Mat<1> &a)
{
    return {a(0, 0)};
}

inline std::array<double, 2> symmetric_eigenvalues(const Mat<2> &a)
{
    const double mean = 0.5 * (a(0, 0) + a(1, 1));
    const double disc = std::sqrt(0.25 * (a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)) +
                                  a(0, 1) * a(0, 1));
    return {mean - disc, mean + disc};
}

inline std::array<double, 3> symmetric_eigenvalues(const Mat<3> &a)
{
    const double q = trace(a) / 3.0;
    double p2 = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
        {
            const double x = a(r, c) - (r == c ? q : 0.0);
            p2 += x * x;
        }
    const double p = std::sqrt(p2 / 6.0);
    if (p < 1e-300)
        return {q, q, q};
    Mat<3> b;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            b(r, c) = (a(r, c) - (r == c ? q : 0.0)) / p;
    double r3 = det(b) / 2.0;
    r3 = std::max(-1.0, std::min(1.0, r3));
    const double phi = std::acos(r3) / 3.0;
    const double e0 = q + 2.0 * p * std::cos(phi);
    const double e2 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double e1 = 3.0 * q - e0 - e2;
    return {e2, e1, e0};
}

/// Packed symmetric-pair bookkeeping for the second-derivative systems.
/// Order matches the unknown vector: [11, 22, (33), 12, (23, 31)].
template <int D>
inline constexpr int packed_size = D *(D + 1) / 2;

template <int D>
struct PackedPairs;

template <>
struct PackedPairs<2>
{
    static constexpr std::array<std::array<int, 2>, 3> pairs{{{0, 0}, {1, 1}, {0, 1}}};
};

template <>
struct PackedPairs<3>
{
    static constexpr std::array<std::array<int, 2>, 6> pairs{
        {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {2, 0}}};
};

/// Monomial vector s_ij: squares first, then single cross products.
template <int D>
inline std::array<double, packed_size<D>> packed_monomials(const Vec<D> &r)
{
    std::array<double, packed_size<D>> s{};
    for (int p = 0; p < packed_size<D>; ++p)
    {
        const auto &mn = PackedPairs<D>::pairs[static_cast<std::size_t>(p)];
        s[static_cast<std::size_t>(p)] = r[mn[0]] * r[mn[1]];
    }
    return s;
}

/// Contraction coefficients so that coef . h_packed = sum_{mn} T_mn H_mn
/// for a symmetric tensor T (packed cross entries carry the factor 2).
template <int D>
inline std::array<double, packed_size<D>> contraction_coefficients(const Mat<D> &t)
{
    std::array<double, packed_size<D>> coef{};
    for (int p = 0; p < packed_size<D>; ++p)
    {
        const auto &mn = PackedPairs<D>::pairs[static_cast<std::size_t>(p)];
        coef[static_cast<std::size_t>(p)] = t(mn[0], mn[1]);
    }
    return coef;
}

/// Unpack [11,22,(33),2*12,(2*23,2*31)] into the symmetric matrix.
template <int D>
inline Mat<D> unpack_symmetric(const std::array<double, packed_size<D>> &h)
{
    Mat<D> out;
    for (int p = 0; p < packed_size<D>; ++p)
    {
        const auto &mn = PackedPairs<D>::pairs[static_cast<std::size_t>(p)];
        if (mn[0] == mn[1])
            out(mn[0], mn[0]) = h[static_cast<std::size_t>(p)];
        else
        {
            out(mn[0], mn[1]) = 0.5 * h[static_cast<std::size_t>(p)];
            out(mn[1], mn[0]) = 0.5 * h[static_cast<std::size_t>(p)];
        }
    }
    return out;
}

} // namespace asph

#endif
