#ifndef ASPH_PARTICLES_HPP
#define ASPH_PARTICLES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernel.hpp"
#include "math.hpp"

namespace asph
{

/// Default smoothing-length-to-spacing ratio; gives roughly 20 neighbors on
/// a 2D isotropic lattice.
inline constexpr double kSmoothingRatio = 1.3;

/// Particle container: positions, volumes, per-particle smoothing tensors,
/// named scalar fields and per-particle diagnostic flags. Positions, volumes
/// and smoothing tensors are immutable once neighbor lists are built.
template <int D>
struct ParticleSet
{
    std::vector<Vec<D>> pos;
    std::vector<double> vol;
    std::vector<SmoothingTensor<D>> smoothing;
    std::map<std::string, std::vector<double>> fields;
    std::vector<std::uint8_t> flags;

    std::int64_t size() const { return static_cast<std::int64_t>(pos.size()); }

    std::vector<double> &add_field(const std::string &name, double init = 0.0)
    {
        auto &f = fields[name];
        f.assign(pos.size(), init);
        return f;
    }
    std::vector<double> &field(const std::string &name) { return fields.at(name); }
    const std::vector<double> &field(const std::string &name) const { return fields.at(name); }
};

/// Axis-aligned lattice with per-axis spacing (anisotropic resolution).
template <int D>
struct LatticeSpec
{
    Vec<D> lo{};
    Vec<D> hi{};
    std::array<double, D> dp{};
    double smoothing_ratio = kSmoothingRatio;
};

/// Regular lattice with particles at cell centers. The per-axis count is the
/// rounded extent/spacing, so particle volumes always tile the domain
/// exactly; the effective spacing is stored back into the smoothing tensors.
template <int D>
ParticleSet<D> generate_lattice(const LatticeSpec<D> &spec)
{
    std::array<std::int64_t, D> n{};
    std::array<double, D> dp{};
    double cell_volume = 1.0;
    for (int k = 0; k < D; ++k)
    {
        const double extent = spec.hi[k] - spec.lo[k];
        if (!(spec.dp[static_cast<std::size_t>(k)] > 0.0))
            throw EmptyDomain("generate_lattice: spacing must be positive");
        const double count = std::floor(extent / spec.dp[static_cast<std::size_t>(k)] + 0.5);
        if (!(count >= 1.0))
            throw EmptyDomain("generate_lattice: axis " + std::to_string(k) + " admits zero particles");
        n[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(count);
        dp[static_cast<std::size_t>(k)] = extent / count;
        cell_volume *= dp[static_cast<std::size_t>(k)];
    }

    std::int64_t total = 1;
    for (int k = 0; k < D; ++k)
        total *= n[static_cast<std::size_t>(k)];

    std::array<double, D> h{};
    for (int k = 0; k < D; ++k)
        h[static_cast<std::size_t>(k)] = spec.smoothing_ratio * dp[static_cast<std::size_t>(k)];
    const SmoothingTensor<D> g = smoothing_from_lengths<D>(h);

    ParticleSet<D> ps;
    ps.pos.resize(static_cast<std::size_t>(total));
    ps.vol.assign(static_cast<std::size_t>(total), cell_volume);
    ps.smoothing.assign(static_cast<std::size_t>(total), g);
    ps.flags.assign(static_cast<std::size_t>(total), 0);

    for (std::int64_t idx = 0; idx < total; ++idx)
    {
        std::int64_t rem = idx;
        Vec<D> x;
        for (int k = 0; k < D; ++k)
        {
            const std::int64_t ik = rem % n[static_cast<std::size_t>(k)];
            rem /= n[static_cast<std::size_t>(k)];
            x[k] = spec.lo[k] + (static_cast<double>(ik) + 0.5) * dp[static_cast<std::size_t>(k)];
        }
        ps.pos[static_cast<std::size_t>(idx)] = x;
    }
    return ps;
}

/// Convenience for the 2D benchmarks: N_y cells across the height and an
/// anisotropic ratio r = dp_x / dp_y.
inline LatticeSpec<2> lattice_from_ny(const Vec<2> &lo, const Vec<2> &hi,
                                      int ny, double ratio)
{
    if (ny < 1)
        throw EmptyDomain("lattice_from_ny: N_y must be >= 1");
    LatticeSpec<2> spec;
    spec.lo = lo;
    spec.hi = hi;
    const double dp_y = (hi[1] - lo[1]) / static_cast<double>(ny);
    spec.dp = {ratio * dp_y, dp_y};
    return spec;
}

} // namespace asph

#endif
