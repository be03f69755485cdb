#ifndef ASPH_KERNEL_HPP
#define ASPH_KERNEL_HPP

#include <cmath>

#include "errors.hpp"
#include "math.hpp"

namespace asph
{

/// Linear map from real separations to normalized ones, eta = G r.
/// Symmetric positive definite; semi_axes are the smoothing lengths along
/// the kernel principal axes (the inverse eigenvalues of g), kept for cell
/// sizing and time-step control.
template <int D>
struct SmoothingTensor
{
    Mat<D> g;
    double det_g = 0.0;
    std::array<double, D> semi_axes{};
    bool isotropic = false;

    double max_semi_axis() const
    {
        double h = semi_axes[0];
        for (int k = 1; k < D; ++k)
            h = std::max(h, semi_axes[static_cast<std::size_t>(k)]);
        return h;
    }
    double min_semi_axis() const
    {
        double h = semi_axes[0];
        for (int k = 1; k < D; ++k)
            h = std::min(h, semi_axes[static_cast<std::size_t>(k)]);
        return h;
    }
};

namespace detail
{

template <int D>
inline SmoothingTensor<D> finish_smoothing(const Mat<D> &g, const std::array<double, D> &axes)
{
    SmoothingTensor<D> out;
    out.g = g;
    out.det_g = det(g);
    out.semi_axes = axes;
    double lo = axes[0], hi = axes[0];
    for (int k = 1; k < D; ++k)
    {
        lo = std::min(lo, axes[static_cast<std::size_t>(k)]);
        hi = std::max(hi, axes[static_cast<std::size_t>(k)]);
    }
    out.isotropic = (hi - lo) <= 1e-14 * hi;
    return out;
}

} // namespace detail

template <int D>
inline SmoothingTensor<D> smoothing_from_lengths(const std::array<double, D> &h)
{
    Mat<D> g;
    for (int k = 0; k < D; ++k)
    {
        if (!(h[static_cast<std::size_t>(k)] > 0.0))
            throw NonPositiveLength("smoothing length must be positive");
        g(k, k) = 1.0 / h[static_cast<std::size_t>(k)];
    }
    return detail::finish_smoothing<D>(g, h);
}

template <int D>
inline SmoothingTensor<D> isotropic_smoothing(double h)
{
    std::array<double, D> hs;
    hs.fill(h);
    return smoothing_from_lengths<D>(hs);
}

/// 2D transformation tensor from semi-axis lengths and the rotation angle of
/// the semimajor axis: g = R(theta) diag(1/h1, 1/h2) R(theta)^T.
inline SmoothingTensor<2> build_g_2d(double h1, double h2, double theta)
{
    if (!(h1 > 0.0) || !(h2 > 0.0))
        throw NonPositiveLength("build_g_2d: smoothing length must be positive");
    const double c = std::cos(theta), s = std::sin(theta);
    const double a = 1.0 / h1, b = 1.0 / h2;
    Mat<2> g;
    g(0, 0) = a * c * c + b * s * s;
    g(0, 1) = (a - b) * c * s;
    g(1, 0) = g(0, 1);
    g(1, 1) = a * s * s + b * c * c;
    return detail::finish_smoothing<2>(g, {h1, h2});
}

/// 3D transformation tensor from per-axis smoothing lengths and the
/// rotation angles (omega, psi, chi) between kernel and real frames.
inline SmoothingTensor<3> build_g_3d(double h1, double h2, double h3,
                                     double omega, double psi, double chi)
{
    if (!(h1 > 0.0) || !(h2 > 0.0) || !(h3 > 0.0))
        throw NonPositiveLength("build_g_3d: smoothing length must be positive");
    const double a1 = 1.0 / h1, a2 = 1.0 / h2, a3 = 1.0 / h3;
    const double w1 = std::cos(omega), w2 = std::sin(omega);
    const double p1 = std::cos(psi), p2 = std::sin(psi);
    const double x1 = std::cos(chi), x2 = std::sin(chi);

    Mat<3> g;
    g(0, 0) = a1 * w1 * w1 * p1 * p1 +
              a2 * (w1 * p2 * x2 - w2 * x1) * (w1 * p2 * x2 - w2 * x1) +
              a3 * (w1 * p2 * x1 + w2 * x2) * (w1 * p2 * x1 + w2 * x2);
    g(1, 0) = a1 * w1 * w2 * p1 * p1 +
              a2 * (w1 * p2 * x2 - w2 * x1) * (w2 * p2 * x2 + w1 * x1) +
              a3 * (w2 * p2 * x1 - w1 * x2) * (w1 * p2 * x1 + w2 * x2);
    g(2, 0) = -a1 * w1 * p1 * p2 +
              a2 * p1 * x2 * (w1 * p2 * x2 - w2 * x1) +
              a3 * p1 * x1 * (w1 * p2 * x1 + w2 * x2);
    g(1, 1) = a1 * w2 * w2 * p1 * p1 +
              a2 * (w2 * p2 * x2 + w1 * x1) * (w2 * p2 * x2 + w1 * x1) +
              a3 * (w2 * p2 * x1 - w1 * x2) * (w2 * p2 * x1 - w1 * x2);
    g(2, 1) = -a1 * w2 * p1 * p2 +
              a2 * p1 * x2 * (w2 * p2 * x2 + w1 * x1) +
              a3 * p1 * x1 * (w2 * p2 * x1 - w1 * x2);
    g(2, 2) = a1 * p2 * p2 + a2 * p1 * p1 * x2 * x2 + a3 * p1 * p1 * x1 * x1;
    g(0, 1) = g(1, 0);
    g(0, 2) = g(2, 0);
    g(1, 2) = g(2, 1);
    return detail::finish_smoothing<3>(g, {h1, h2, h3});
}

/// Wendland C2 normalization constants per dimension (times det G).
template <int D>
inline double kernel_normalization(double det_g)
{
    if constexpr (D == 1)
        return 0.75 * det_g;
    else if constexpr (D == 2)
        return 7.0 / (4.0 * M_PI) * det_g;
    else
        return 21.0 / (16.0 * M_PI) * det_g;
}

/// W(eta) = A (1 - eta/2)^4 (1 + 2 eta) on eta <= 2, zero outside.
template <int D>
inline double kernel_value(const SmoothingTensor<D> &g, const Vec<D> &r)
{
    const double eta = norm(g.g * r);
    if (eta >= 2.0)
        return 0.0;
    const double u = 1.0 - 0.5 * eta;
    const double u2 = u * u;
    return kernel_normalization<D>(g.det_g) * u2 * u2 * (1.0 + 2.0 * eta);
}

/// grad W = A G (eta_vec / eta) (-5 eta (1 - eta/2)^3); zero at the origin
/// (removable singularity) and outside the support.
template <int D>
inline Vec<D> kernel_gradient(const SmoothingTensor<D> &g, const Vec<D> &r)
{
    const Vec<D> eta_vec = g.g * r;
    const double eta = norm(eta_vec);
    if (eta >= 2.0 || eta == 0.0)
        return Vec<D>{};
    const double u = 1.0 - 0.5 * eta;
    // dW/deta = -5 A eta (1 - eta/2)^3, so G (eta_vec/eta) dW/deta = -5 A u^3 G eta_vec
    const double scale = kernel_normalization<D>(g.det_g) * (-5.0 * u * u * u);
    return (g.g * eta_vec) * scale;
}

template <int D>
struct KernelSample
{
    double value = 0.0;
    Vec<D> gradient{};
};

/// Pairwise symmetrization for spatially varying smoothing tensors:
/// plain averages of the two single-tensor evaluations.
template <int D>
inline KernelSample<D> symmetrized_pair(const SmoothingTensor<D> &gi,
                                        const SmoothingTensor<D> &gj,
                                        const Vec<D> &r_ij)
{
    KernelSample<D> out;
    out.value = 0.5 * (kernel_value(gi, r_ij) + kernel_value(gj, r_ij));
    out.gradient = 0.5 * (kernel_gradient(gi, r_ij) + kernel_gradient(gj, r_ij));
    return out;
}

} // namespace asph

#endif
