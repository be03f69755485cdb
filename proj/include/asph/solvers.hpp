#ifndef ASPH_SOLVERS_HPP
#define ASPH_SOLVERS_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "operators.hpp"

namespace asph
{

/// Symmetric positive-definite diffusion tensor with its cached Cholesky
/// factor. Construction rejects indefinite input.
template <int D>
struct DiffusionTensor
{
    Mat<D> d;
    Mat<D> chol; // lower triangular, chol chol^T = d
    double max_eigenvalue = 0.0;

    static DiffusionTensor from_matrix(const Mat<D> &m)
    {
        DiffusionTensor out;
        out.d = m;
        out.chol = cholesky(m);
        out.max_eigenvalue = symmetric_eigenvalues(m).back();
        return out;
    }

    static DiffusionTensor isotropic(double value)
    {
        Mat<D> m;
        for (int k = 0; k < D; ++k)
            m(k, k) = value;
        return from_matrix(m);
    }
};

/// dt = safety * min_i h_min,i^2 / D_max_eig.
template <int D>
double stable_dt(const ParticleSet<D> &ps, double d_max_eig, double safety = 0.25)
{
    double h_min = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < ps.size(); ++i)
        h_min = std::min(h_min, ps.smoothing[static_cast<std::size_t>(i)].min_semi_axis());
    return safety * h_min * h_min / d_max_eig;
}

/// One forward-Euler diffusion step, f <- f + dt div(D grad f). Convenience
/// wrapper that assembles the operator; time loops keep a DiffusionApplicator
/// instead and reuse it.
template <int D>
std::vector<double> step_diffusion(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                   const CorrectionField<D> &corr, const std::vector<double> &field,
                                   const DiffusionTensor<D> &dt_tensor, double dt)
{
    const HessianOperator<D> op(ps, nl, corr);
    const DiffusionApplicator<D> applicator(op, dt_tensor.d);
    std::vector<double> out(field.size());
    applicator.euler_step(field, out, dt);
    return out;
}

/// Free-space Gaussian solving dc/dt = div(D grad c) with unit mass:
/// c(x,t) = (4 pi t)^(-dim/2) det(D)^(-1/2) exp(-(x-x0)^T D^-1 (x-x0) / (4t)).
template <int D>
struct GaussianReference
{
    DiffusionTensor<D> d;
    Vec<D> x0{};

    double value(const Vec<D> &x, double t) const
    {
        double det_l = 1.0;
        for (int k = 0; k < D; ++k)
            det_l *= d.chol(k, k);
        const Vec<D> q = x - x0;
        const double quad = dot(q, cholesky_solve(d.chol, q));
        const double norm = std::pow(4.0 * M_PI * t, -0.5 * D) / det_l;
        return norm * std::exp(-quad / (4.0 * t));
    }
};

/// Normalized root mean square error sqrt(sum (ref-num)^2) / sqrt(sum ref^2).
inline double rmse(const std::vector<double> &numeric, const std::vector<double> &reference)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
    {
        const double e = reference[i] - numeric[i];
        num += e * e;
        den += reference[i] * reference[i];
    }
    if (!(den > 0.0))
        throw ZeroReference("rmse: reference is identically zero");
    return std::sqrt(num) / std::sqrt(den);
}

template <int D>
struct FieldMoments
{
    double mass = 0.0;
    Vec<D> centroid{};
    Mat<D> covariance{};
};

/// Mass-weighted centroid and second central moment of a concentration
/// field; the oracle for the full-tensor spreading check.
template <int D>
FieldMoments<D> field_covariance(const ParticleSet<D> &ps, const std::vector<double> &field)
{
    FieldMoments<D> out;
    Vec<D> first{};
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const double m = ps.vol[static_cast<std::size_t>(i)] * field[static_cast<std::size_t>(i)];
        out.mass += m;
        first += ps.pos[static_cast<std::size_t>(i)] * m;
    }
    if (!(out.mass > 0.0))
        throw NonPositiveMass("field_covariance: total mass must be positive");
    out.centroid = first * (1.0 / out.mass);
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const double m = ps.vol[static_cast<std::size_t>(i)] * field[static_cast<std::size_t>(i)];
        const Vec<D> q = ps.pos[static_cast<std::size_t>(i)] - out.centroid;
        out.covariance += outer(q, q) * m;
    }
    out.covariance *= 1.0 / out.mass;
    return out;
}

/// Two-variable excitable-media kinetics for the transmembrane potential.
struct AlievPanfilovParams
{
    double k = 8.0;
    double a = 0.15;
    double b = 0.15;
    double eps0 = 0.034;
    double mu1 = 0.2;
    double mu2 = 0.3;
};

/// Returns (I_ion, dw/dt):
///   I_ion = -k V (V - a)(V - 1) - w V
///   dw/dt = (eps0 + mu1 w / (mu2 + V)) (-k V (V - b - 1) - w)
inline std::pair<double, double> aliev_panfilov_rhs(double vm, double w,
                                                    const AlievPanfilovParams &p)
{
    const double i_ion = -p.k * vm * (vm - p.a) * (vm - 1.0) - w * vm;
    const double eps = p.eps0 + p.mu1 * w / (p.mu2 + vm);
    const double dw = eps * (-p.k * vm * (vm - p.b - 1.0) - w);
    return {i_ion, dw};
}

/// Nondimensional potential to millivolts.
inline double rescale_potential(double vm) { return 100.0 * vm - 80.0; }

/// Reaction sub-steps never exceed this nondimensional interval.
inline constexpr double kReactionDtCap = 0.01;

/// Explicit reaction update over an interval, subcycled against the cap.
/// Both variables advance from the same state within a sub-step.
inline void advance_reaction(std::vector<double> &vm, std::vector<double> &w,
                             const AlievPanfilovParams &p, double interval)
{
    const int sub = std::max(1, static_cast<int>(std::ceil(interval / kReactionDtCap)));
    const double dt = interval / sub;
    const std::int64_t n = static_cast<std::int64_t>(vm.size());
    for (int s = 0; s < sub; ++s)
    {
        parallel_for(n, [&](std::int64_t i) {
            const auto [i_ion, dw] = aliev_panfilov_rhs(vm[static_cast<std::size_t>(i)],
                                                        w[static_cast<std::size_t>(i)], p);
            vm[static_cast<std::size_t>(i)] += dt * i_ion;
            w[static_cast<std::size_t>(i)] += dt * dw;
        });
    }
}

/// One Strang step: half reaction, full diffusion (conductivity tensor via
/// the prepared applicator, C_m = 1), half reaction. `scratch` must have the
/// same size as vm; vm holds the result afterwards.
template <int D>
void step_reaction_diffusion(std::vector<double> &vm, std::vector<double> &w,
                             const DiffusionApplicator<D> &conductivity,
                             const AlievPanfilovParams &p, double dt,
                             std::vector<double> &scratch)
{
    advance_reaction(vm, w, p, 0.5 * dt);
    conductivity.euler_step(vm, scratch, dt);
    vm.swap(scratch);
    advance_reaction(vm, w, p, 0.5 * dt);
}

} // namespace asph

#endif
