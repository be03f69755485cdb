#ifndef ASPH_TESTS_ORACLE_QUADRATURE_HPP
#define ASPH_TESTS_ORACLE_QUADRATURE_HPP

// Test-only quadrature of the kernel over real space. Polar/spherical
// coordinates with the radial integral split at the support boundary along
// each ray: the integrand is a low-degree polynomial there, so Gauss-
// Legendre is exact in rho and the angular trapezoid/GL rules converge
// spectrally. Independent of the kernel's own normalization bookkeeping.

#include <cmath>
#include <vector>

#include "asph/kernel.hpp"

namespace asph::oracle
{

struct Rule
{
    std::vector<double> x; // nodes on [0,1]
    std::vector<double> w;
};

/// Gauss-Legendre nodes/weights mapped to [0,1], Newton on P_n.
inline Rule gauss_legendre(int n)
{
    Rule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15)
                break;
        }
        rule.x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - t); // descending roots -> ascending nodes
        rule.w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - t * t) * pp * pp);
    }
    return rule;
}

/// Support radius along a unit direction: |G (rho u)| = 2.
template <int D>
inline double support_radius(const SmoothingTensor<D> &g, const Vec<D> &unit)
{
    return 2.0 / norm(g.g * unit);
}

inline double kernel_mass(const SmoothingTensor<1> &g)
{
    const Rule rho = gauss_legendre(16);
    double total = 0.0;
    for (const double sign : {-1.0, 1.0})
    {
        const Vec<1> unit{{sign}};
        const double r_max = support_radius(g, unit);
        for (std::size_t i = 0; i < rho.x.size(); ++i)
        {
            const double r = r_max * rho.x[i];
            total += r_max * rho.w[i] * kernel_value(g, Vec<1>{{sign * r}});
        }
    }
    return total;
}

inline double kernel_mass(const SmoothingTensor<2> &g)
{
    const Rule rho = gauss_legendre(16);
    const int n_theta = 256;
    double total = 0.0;
    for (int it = 0; it < n_theta; ++it)
    {
        const double theta = 2.0 * M_PI * it / n_theta;
        const Vec<2> unit{{std::cos(theta), std::sin(theta)}};
        const double r_max = support_radius(g, unit);
        double ray = 0.0;
        for (std::size_t i = 0; i < rho.x.size(); ++i)
        {
            const double r = r_max * rho.x[i];
            ray += r_max * rho.w[i] * r * kernel_value(g, unit * r);
        }
        total += ray * (2.0 * M_PI / n_theta);
    }
    return total;
}

inline double kernel_mass(const SmoothingTensor<3> &g)
{
    const Rule rho = gauss_legendre(16);
    const Rule mu = gauss_legendre(64); // cos(polar) on [-1,1]
    const int n_phi = 128;
    double total = 0.0;
    for (std::size_t im = 0; im < mu.x.size(); ++im)
    {
        const double c = 2.0 * mu.x[im] - 1.0;
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int ip = 0; ip < n_phi; ++ip)
        {
            const double phi = 2.0 * M_PI * ip / n_phi;
            const Vec<3> unit{{s * std::cos(phi), s * std::sin(phi), c}};
            const double r_max = support_radius(g, unit);
            double ray = 0.0;
            for (std::size_t i = 0; i < rho.x.size(); ++i)
            {
                const double r = r_max * rho.x[i];
                ray += r_max * rho.w[i] * r * r * kernel_value(g, unit * r);
            }
            total += ray * (2.0 * mu.w[im]) * (2.0 * M_PI / n_phi);
        }
    }
    return total;
}

} // namespace asph::oracle

#endif
