#ifndef ASPH_OPERATORS_HPP
#define ASPH_OPERATORS_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "linalg.hpp"
#include "neighbors.hpp"
#include "parallel.hpp"
#include "particles.hpp"

namespace asph
{

/// Per-particle first-order kernel-correction tensors
/// B_i = [sum_j V_j (r_j - r_i) (x) grad_i W_ij]^-1.
/// A singular sum (isolated particle, degenerate stencil) flags the particle
/// and substitutes the identity.
template <int D>
struct CorrectionField
{
    std::vector<Mat<D>> B;
    std::vector<std::uint8_t> singular;
    std::int64_t singular_count = 0;
};

template <int D>
CorrectionField<D> compute_correction_matrices(const ParticleSet<D> &ps, const NeighborLists<D> &nl)
{
    const std::int64_t n = ps.size();
    CorrectionField<D> out;
    out.B.assign(static_cast<std::size_t>(n), Mat<D>::identity());
    out.singular.assign(static_cast<std::size_t>(n), 0);

    parallel_for(n, [&](std::int64_t i) {
        Mat<D> sum{};
        double scale = 0.0;
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            const Vec<D> to_j = -nl.r[static_cast<std::size_t>(p)]; // r_j - r_i
            const Vec<D> g = nl.grad[static_cast<std::size_t>(p)] * ps.vol[j];
            sum += outer(to_j, g);
        }
        for (double x : sum.m)
            scale = std::max(scale, std::abs(x));
        Mat<D> inv;
        double floor = 1e-12;
        for (int k = 0; k < D; ++k)
            floor *= scale;
        if (invert(sum, inv, floor))
        {
            out.B[static_cast<std::size_t>(i)] = inv;
        }
        else
        {
            out.singular[static_cast<std::size_t>(i)] = 1;
        }
    });
    for (std::int64_t i = 0; i < n; ++i)
        out.singular_count += out.singular[static_cast<std::size_t>(i)];
    return out;
}

/// First-order-consistent gradient: E_i = sum_j V_j (f_j - f_i) B_i^T grad_i W_ij.
/// Exact on affine fields at every particle with a nonsingular correction.
template <int D>
std::vector<Vec<D>> corrected_gradient(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                       const CorrectionField<D> &corr,
                                       const std::vector<double> &field)
{
    const std::int64_t n = ps.size();
    std::vector<Vec<D>> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        const double fi = field[static_cast<std::size_t>(i)];
        Vec<D> e{};
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            e += nl.grad[static_cast<std::size_t>(p)] * (ps.vol[j] * (field[j] - fi));
        }
        out[static_cast<std::size_t>(i)] = transpose_times(corr.B[static_cast<std::size_t>(i)], e);
    });
    return out;
}

/// Uncorrected conservative (pair-symmetric) gradient,
/// 2 sum_j V_j (f_i + f_j)/2 grad_i W_ij. Kept for comparison; O(h^2) on
/// interior particles, not exact on affine fields.
template <int D>
std::vector<Vec<D>> weak_gradient(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                  const std::vector<double> &field)
{
    const std::int64_t n = ps.size();
    std::vector<Vec<D>> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        const double fi = field[static_cast<std::size_t>(i)];
        Vec<D> e{};
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            e += nl.grad[static_cast<std::size_t>(p)] * (ps.vol[j] * (fi + field[j]));
        }
        out[static_cast<std::size_t>(i)] = e;
    });
    return out;
}

/// Classical isotropic second-derivative sum with a scalar coefficient d:
/// (div(d grad f))_i = 2 d sum_j V_j (f_i - f_j) (r_ij . grad W_ij)/|r_ij|^2.
/// Requires isotropic smoothing tensors (well-defined radial derivative).
template <int D>
std::vector<double> cleary_monaghan_laplacian(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                              const std::vector<double> &field, double d)
{
    for (std::int64_t i = 0; i < ps.size(); ++i)
        if (!ps.smoothing[static_cast<std::size_t>(i)].isotropic)
            throw AnisotropicKernelUnsupported(
                "cleary_monaghan_laplacian: particle " + std::to_string(i) +
                " carries a non-isotropic smoothing tensor");

    const std::int64_t n = ps.size();
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        const double fi = field[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
            acc += ps.vol[j] * (fi - field[j]) *
                   dot(r, nl.grad[static_cast<std::size_t>(p)]) / squared_norm(r);
        }
        out[static_cast<std::size_t>(i)] = 2.0 * d * acc;
    });
    return out;
}

template <int D>
using HessianPacked = std::array<double, packed_size<D>>;

/// Second-derivative recovery: per particle, a packed vector
/// [d11, d22, (d33), 2 d12, (2 d23, 2 d31)] solving the moment system built
/// from kernel-weighted Taylor residuals. Exact on globally quadratic
/// fields wherever the moment matrix is invertible, boundaries included.
///
/// Assembly happens once per (geometry, transform); the per-field solve is
/// repeated. An optional separation transform R_ij = T r_ij evaluates every
/// positional monomial and the |r|^4 weight on transformed separations while
/// kernel gradients stay in real space: with T = L^-1 from D = L L^T the
/// packed result is the transformed-coordinate Hessian whose trace equals
/// div(D grad f).
template <int D>
class HessianOperator
{
  public:
    static constexpr int P = packed_size<D>;

    HessianOperator(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                    const CorrectionField<D> &corr)
        : HessianOperator(ps, nl, corr, Mat<D>::identity())
    {
    }

    HessianOperator(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                    const CorrectionField<D> &corr, const Mat<D> &separation_transform)
        : ps_(&ps), nl_(&nl)
    {
        const std::int64_t n = ps.size();
        const std::int64_t pairs = nl.pairs();
        vg_.resize(static_cast<std::size_t>(pairs));
        ws2_.resize(static_cast<std::size_t>(pairs));
        inv_m_.resize(static_cast<std::size_t>(n));
        pm_.resize(static_cast<std::size_t>(n));
        flagged_.assign(static_cast<std::size_t>(n), 0);
        condition_.assign(static_cast<std::size_t>(n), 0.0);

        const bool transformed = [&] {
            const Mat<D> id = Mat<D>::identity();
            for (std::size_t k = 0; k < id.m.size(); ++k)
                if (separation_transform.m[k] != id.m[k])
                    return true;
            return false;
        }();

        parallel_for(n, [&](std::int64_t i) {
            // volume-weighted corrected gradients, cached per pair
            const Mat<D> &b = corr.B[static_cast<std::size_t>(i)];
            for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
            {
                const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
                vg_[static_cast<std::size_t>(p)] =
                    transpose_times(b, nl.grad[static_cast<std::size_t>(p)]) * ps.vol[j];
            }

            // first sweep: A^(mn) = sum_k s(R_ik)^(mn) vg_ik
            std::array<Vec<D>, P> a{};
            for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
            {
                const Vec<D> rr = transformed
                                      ? separation_transform * nl.r[static_cast<std::size_t>(p)]
                                      : nl.r[static_cast<std::size_t>(p)];
                const auto s = packed_monomials<D>(rr);
                for (int q = 0; q < P; ++q)
                    a[static_cast<std::size_t>(q)] +=
                        vg_[static_cast<std::size_t>(p)] * s[static_cast<std::size_t>(q)];
            }

            // second sweep: moment matrix and the cached rhs machinery
            DenseMatrix<P> m;
            std::array<double, P * D> pm{};
            for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
            {
                const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
                const Vec<D> rr = transformed ? separation_transform * r : r;
                const auto s = packed_monomials<D>(rr);
                const double rr2 = squared_norm(rr);
                const double w = dot(rr, vg_[static_cast<std::size_t>(p)]) / (rr2 * rr2);
                std::array<double, P> c{};
                for (int q = 0; q < P; ++q)
                    c[static_cast<std::size_t>(q)] =
                        s[static_cast<std::size_t>(q)] + dot(r, a[static_cast<std::size_t>(q)]);
                auto &ws2 = ws2_[static_cast<std::size_t>(p)];
                for (int row = 0; row < P; ++row)
                {
                    const double ws = w * s[static_cast<std::size_t>(row)];
                    ws2[static_cast<std::size_t>(row)] = 2.0 * ws;
                    for (int col = 0; col < P; ++col)
                        m(row, col) += ws * c[static_cast<std::size_t>(col)];
                    for (int k = 0; k < D; ++k)
                        pm[static_cast<std::size_t>(row * D + k)] += 2.0 * ws * r[k];
                }
            }
            pm_[static_cast<std::size_t>(i)] = pm;

            const LuFactors<P> f = lu_factor(m);
            std::array<double, P * P> inv{};
            double cond = std::numeric_limits<double>::infinity();
            if (lu_inverse(f, inv))
                cond = one_norm<P>(m.a) * one_norm<P>(inv);
            condition_[static_cast<std::size_t>(i)] = cond;
            if (!f.ok || !(cond <= 1e12))
            {
                flagged_[static_cast<std::size_t>(i)] = 1;
            }
            else
            {
                inv_m_[static_cast<std::size_t>(i)] = inv;
            }
        });
        for (std::int64_t i = 0; i < n; ++i)
            flagged_count_ += flagged_[static_cast<std::size_t>(i)];
    }

    /// Solve the cached moment system against a field. Flagged particles
    /// fall back to the isotropic radial estimate split evenly across the
    /// diagonal (cross terms zero).
    std::vector<HessianPacked<D>> apply(const std::vector<double> &field) const
    {
        const std::int64_t n = ps_->size();
        std::vector<HessianPacked<D>> out(static_cast<std::size_t>(n));
        parallel_for(n, [&](std::int64_t i) { out[static_cast<std::size_t>(i)] = apply_at(field, i); });
        return out;
    }

    HessianPacked<D> apply_at(const std::vector<double> &field, std::int64_t i) const
    {
        const NeighborLists<D> &nl = *nl_;
        HessianPacked<D> h{};
        if (flagged_[static_cast<std::size_t>(i)])
        {
            const double cm = fallback_trace(field, i);
            for (int k = 0; k < D; ++k)
                h[static_cast<std::size_t>(k)] = cm / static_cast<double>(D);
            return h;
        }
        const double fi = field[static_cast<std::size_t>(i)];
        Vec<D> e{};
        std::array<double, P> q{};
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            const double dfi = fi - field[j];
            e += vg_[static_cast<std::size_t>(p)] * (-dfi);
            const auto &ws2 = ws2_[static_cast<std::size_t>(p)];
            for (int row = 0; row < P; ++row)
                q[static_cast<std::size_t>(row)] += ws2[static_cast<std::size_t>(row)] * dfi;
        }
        std::array<double, P> rhs{};
        const auto &pm = pm_[static_cast<std::size_t>(i)];
        for (int row = 0; row < P; ++row)
        {
            double s = -q[static_cast<std::size_t>(row)];
            for (int k = 0; k < D; ++k)
                s += pm[static_cast<std::size_t>(row * D + k)] * e[k];
            rhs[static_cast<std::size_t>(row)] = s;
        }
        const auto &inv = inv_m_[static_cast<std::size_t>(i)];
        for (int row = 0; row < P; ++row)
        {
            double s = 0.0;
            for (int col = 0; col < P; ++col)
                s += inv[static_cast<std::size_t>(row * P + col)] * rhs[static_cast<std::size_t>(col)];
            h[static_cast<std::size_t>(row)] = s;
        }
        return h;
    }

    /// Isotropic radial second-derivative estimate (unit coefficient) used
    /// where the moment system is unusable.
    double fallback_trace(const std::vector<double> &field, std::int64_t i) const
    {
        const NeighborLists<D> &nl = *nl_;
        const ParticleSet<D> &ps = *ps_;
        const double fi = field[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
        {
            const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
            const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
            acc += ps.vol[j] * (fi - field[j]) *
                   dot(r, nl.grad[static_cast<std::size_t>(p)]) / squared_norm(r);
        }
        return 2.0 * acc;
    }

    const std::vector<std::uint8_t> &flagged() const { return flagged_; }
    std::int64_t flagged_count() const { return flagged_count_; }
    const std::vector<double> &condition() const { return condition_; }
    const ParticleSet<D> &particles() const { return *ps_; }
    const NeighborLists<D> &neighbor_lists() const { return *nl_; }
    const std::vector<Vec<D>> &weighted_corrected_gradients() const { return vg_; }
    const std::vector<std::array<double, P>> &pair_rhs_weights() const { return ws2_; }
    const std::array<double, P * P> &inverse_moment(std::int64_t i) const
    {
        return inv_m_[static_cast<std::size_t>(i)];
    }
    const std::array<double, P * D> &pair_weight_matrix(std::int64_t i) const
    {
        return pm_[static_cast<std::size_t>(i)];
    }

  private:
    const ParticleSet<D> *ps_;
    const NeighborLists<D> *nl_;
    std::vector<Vec<D>> vg_;
    std::vector<std::array<double, P>> ws2_;
    std::vector<std::array<double, P * P>> inv_m_;
    std::vector<std::array<double, P * D>> pm_;
    std::vector<std::uint8_t> flagged_;
    std::vector<double> condition_;
    std::int64_t flagged_count_ = 0;
};

/// Sum of the diagonal second derivatives (first dim packed entries).
template <int D>
std::vector<double> laplacian_trace(const std::vector<HessianPacked<D>> &h)
{
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        double t = h[i][0];
        for (int k = 1; k < D; ++k)
            t += h[i][static_cast<std::size_t>(k)];
        out[i] = t;
    }
    return out;
}

/// Contract packed Hessians with a symmetric tensor: sum_mn T_mn H_mn.
/// Zero coefficients are skipped so the identity tensor reproduces
/// laplacian_trace bit for bit.
template <int D>
std::vector<double> contract_packed(const std::vector<HessianPacked<D>> &h, const Mat<D> &t)
{
    const auto coef = contraction_coefficients(t);
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        double acc = 0.0;
        bool first = true;
        for (int p = 0; p < packed_size<D>; ++p)
        {
            const double c = coef[static_cast<std::size_t>(p)];
            if (c == 0.0)
                continue;
            const double term = c * h[i][static_cast<std::size_t>(p)];
            acc = first ? term : acc + term;
            first = false;
        }
        out[i] = acc;
    }
    return out;
}

/// Route one: recover the real-space Hessian and contract with D.
template <int D>
std::vector<double> anisotropic_laplacian_trace(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                                const CorrectionField<D> &corr,
                                                const std::vector<double> &field, const Mat<D> &d_tensor)
{
    const Mat<D> l = cholesky(d_tensor); // SPD check
    (void)l;
    const HessianOperator<D> op(ps, nl, corr);
    const auto h = op.apply(field);
    // flagged diagonal fallback already splits the trace evenly, so the
    // contraction below scales it by tr(D)/dim as intended
    return contract_packed<D>(h, d_tensor);
}

/// Route two: Cholesky coordinate change X = L^-1 x. The Hessian system is
/// assembled on transformed separations and the trace of the transformed
/// Hessian is div(D grad f).
template <int D>
std::vector<double> anisotropic_laplacian_transform(const ParticleSet<D> &ps, const NeighborLists<D> &nl,
                                                    const CorrectionField<D> &corr,
                                                    const std::vector<double> &field, const Mat<D> &d_tensor)
{
    const Mat<D> l = cholesky(d_tensor);
    Mat<D> l_inv{};
    // forward substitution on the identity, lower triangular inverse
    for (int c = 0; c < D; ++c)
    {
        l_inv(c, c) = 1.0 / l(c, c);
        for (int r = c + 1; r < D; ++r)
        {
            double s = 0.0;
            for (int k = c; k < r; ++k)
                s -= l(r, k) * l_inv(k, c);
            l_inv(r, c) = s / l(r, r);
        }
    }
    const HessianOperator<D> op(ps, nl, corr, l_inv);
    const auto h = op.apply(field);
    return laplacian_trace<D>(h);
}

/// The full anisotropic diffusion operator collapsed, for a fixed field
/// layout and diffusion tensor, to one coefficient per neighbor pair:
/// L_i = sum_j beta_ij (f_j - f_i). This is the same sum as
/// contract(apply(field), D) regrouped per pair; it is what the time
/// integrators iterate. Flagged rows carry the isotropic fallback scaled by
/// tr(D)/dim.
template <int D>
class DiffusionApplicator
{
  public:
    DiffusionApplicator(const HessianOperator<D> &op, const Mat<D> &d_tensor)
        : DiffusionApplicator(op, std::vector<Mat<D>>{}, d_tensor)
    {
    }

    /// Per-particle tensors (e.g. fiber-dependent conductivity); pass the
    /// uniform tensor in `fallback_tensor` and leave `per_particle` empty
    /// for the homogeneous case.
    DiffusionApplicator(const HessianOperator<D> &op, const std::vector<Mat<D>> &per_particle,
                        const Mat<D> &fallback_tensor)
        : ps_(&op.particles()), nl_(&op.neighbor_lists())
    {
        static constexpr int P = HessianOperator<D>::P;
        const std::int64_t n = ps_->size();
        const NeighborLists<D> &nl = *nl_;
        beta_.resize(static_cast<std::size_t>(nl.pairs()));

        parallel_for(n, [&](std::int64_t i) {
            const Mat<D> &dt = per_particle.empty() ? fallback_tensor
                                                    : per_particle[static_cast<std::size_t>(i)];
            if (op.flagged()[static_cast<std::size_t>(i)])
            {
                const double scale = trace(dt) / static_cast<double>(D);
                for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
                {
                    const std::size_t j = static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)]);
                    const Vec<D> &r = nl.r[static_cast<std::size_t>(p)];
                    beta_[static_cast<std::size_t>(p)] =
                        -2.0 * scale * ps_->vol[j] *
                        dot(r, nl.grad[static_cast<std::size_t>(p)]) / squared_norm(r);
                }
            }
            else
            {
                const auto coef = contraction_coefficients(dt);
                const auto &inv = op.inverse_moment(i);
                std::array<double, P> tau{};
                for (int col = 0; col < P; ++col)
                {
                    double s = 0.0;
                    for (int row = 0; row < P; ++row)
                        s += coef[static_cast<std::size_t>(row)] *
                             inv[static_cast<std::size_t>(row * P + col)];
                    tau[static_cast<std::size_t>(col)] = s;
                }
                const auto &pm = op.pair_weight_matrix(i);
                Vec<D> sigma{};
                for (int k = 0; k < D; ++k)
                {
                    double s = 0.0;
                    for (int row = 0; row < P; ++row)
                        s += tau[static_cast<std::size_t>(row)] * pm[static_cast<std::size_t>(row * D + k)];
                    sigma[k] = s;
                }
                for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
                {
                    double a = 0.0;
                    const auto &ws2 = op.pair_rhs_weights()[static_cast<std::size_t>(p)];
                    for (int row = 0; row < P; ++row)
                        a += tau[static_cast<std::size_t>(row)] * ws2[static_cast<std::size_t>(row)];
                    beta_[static_cast<std::size_t>(p)] =
                        dot(sigma, op.weighted_corrected_gradients()[static_cast<std::size_t>(p)]) + a;
                }
            }
        });
    }

    /// Pairwise differences keep constant fields exact fixed points.
    void apply(const std::vector<double> &f, std::vector<double> &out) const
    {
        const NeighborLists<D> &nl = *nl_;
        parallel_for(ps_->size(), [&](std::int64_t i) {
            const double fi = f[static_cast<std::size_t>(i)];
            double acc = 0.0;
            for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
                acc += beta_[static_cast<std::size_t>(p)] *
                       (f[static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)])] - fi);
            out[static_cast<std::size_t>(i)] = acc;
        });
    }

    /// out = f + dt * L f (forward Euler), reading f and writing out only.
    void euler_step(const std::vector<double> &f, std::vector<double> &out, double dt) const
    {
        const NeighborLists<D> &nl = *nl_;
        parallel_for(ps_->size(), [&](std::int64_t i) {
            const double fi = f[static_cast<std::size_t>(i)];
            double acc = 0.0;
            for (std::int64_t p = nl.begin(i); p < nl.end(i); ++p)
                acc += beta_[static_cast<std::size_t>(p)] *
                       (f[static_cast<std::size_t>(nl.nbr[static_cast<std::size_t>(p)])] - fi);
            out[static_cast<std::size_t>(i)] = fi + dt * acc;
        });
    }

  private:
    const ParticleSet<D> *ps_;
    const NeighborLists<D> *nl_;
    std::vector<double> beta_;
};

} // namespace asph

#endif
