#ifndef ASPH_NEIGHBORS_HPP
#define ASPH_NEIGHBORS_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kernel.hpp"
#include "parallel.hpp"
#include "particles.hpp"

namespace asph
{

/// Uniform background grid for candidate queries. Cell edge is twice the
/// largest smoothing semi-axis over all particles, so the 3^D block around a
/// particle always covers its pair support.
template <int D>
class CellGrid
{
  public:
    explicit CellGrid(const ParticleSet<D> &ps)
    {
        double h_max = 0.0;
        Vec<D> lo = ps.pos.empty() ? Vec<D>{} : ps.pos[0];
        Vec<D> hi = lo;
        for (std::int64_t i = 0; i < ps.size(); ++i)
        {
            h_max = std::max(h_max, ps.smoothing[static_cast<std::size_t>(i)].max_semi_axis());
            for (int k = 0; k < D; ++k)
            {
                lo[k] = std::min(lo[k], ps.pos[static_cast<std::size_t>(i)][k]);
                hi[k] = std::max(hi[k], ps.pos[static_cast<std::size_t>(i)][k]);
            }
        }
        edge_ = 2.0 * h_max;
        if (!(edge_ > 0.0))
            edge_ = 1.0;
        origin_ = lo;
        std::int64_t cells = 1;
        for (int k = 0; k < D; ++k)
        {
            n_[static_cast<std::size_t>(k)] =
                std::max<std::int64_t>(1, static_cast<std::int64_t>((hi[k] - lo[k]) / edge_) + 1);
            cells *= n_[static_cast<std::size_t>(k)];
        }

        // counting sort of particle indices into cells; serial fill keeps
        // bucket contents in ascending index order
        offsets_.assign(static_cast<std::size_t>(cells + 1), 0);
        std::vector<std::int64_t> cell_of(static_cast<std::size_t>(ps.size()));
        for (std::int64_t i = 0; i < ps.size(); ++i)
        {
            const std::int64_t c = cell_index(ps.pos[static_cast<std::size_t>(i)]);
            cell_of[static_cast<std::size_t>(i)] = c;
            ++offsets_[static_cast<std::size_t>(c + 1)];
        }
        for (std::size_t c = 1; c < offsets_.size(); ++c)
            offsets_[c] += offsets_[c - 1];
        items_.resize(static_cast<std::size_t>(ps.size()));
        std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (std::int64_t i = 0; i < ps.size(); ++i)
            items_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(i)])]++)] =
                i;
    }

    double cell_edge() const { return edge_; }

    /// Candidate indices for particle i: contents of the 3^D block of cells
    /// around it, excluding i itself. A superset of the true neighbor set.
    void query(const ParticleSet<D> &ps, std::int64_t i, std::vector<std::int64_t> &out) const
    {
        out.clear();
        std::array<std::int64_t, D> base{};
        coords(ps.pos[static_cast<std::size_t>(i)], base);
        std::array<std::int64_t, D> c{};
        scan_block(base, 0, c, i, out);
    }

  private:
    void scan_block(const std::array<std::int64_t, D> &base, int axis,
                    std::array<std::int64_t, D> &c, std::int64_t self,
                    std::vector<std::int64_t> &out) const
    {
        if (axis == D)
        {
            std::int64_t idx = 0;
            for (int k = D - 1; k >= 0; --k)
                idx = idx * n_[static_cast<std::size_t>(k)] + c[static_cast<std::size_t>(k)];
            for (std::int64_t p = offsets_[static_cast<std::size_t>(idx)];
                 p < offsets_[static_cast<std::size_t>(idx + 1)]; ++p)
            {
                const std::int64_t j = items_[static_cast<std::size_t>(p)];
                if (j != self)
                    out.push_back(j);
            }
            return;
        }
        for (std::int64_t d = -1; d <= 1; ++d)
        {
            const std::int64_t ck = base[static_cast<std::size_t>(axis)] + d;
            if (ck < 0 || ck >= n_[static_cast<std::size_t>(axis)])
                continue;
            c[static_cast<std::size_t>(axis)] = ck;
            scan_block(base, axis + 1, c, self, out);
        }
    }

    void coords(const Vec<D> &x, std::array<std::int64_t, D> &c) const
    {
        for (int k = 0; k < D; ++k)
        {
            std::int64_t ck = static_cast<std::int64_t>((x[k] - origin_[k]) / edge_);
            ck = std::max<std::int64_t>(0, std::min(ck, n_[static_cast<std::size_t>(k)] - 1));
            c[static_cast<std::size_t>(k)] = ck;
        }
    }

    std::int64_t cell_index(const Vec<D> &x) const
    {
        std::array<std::int64_t, D> c{};
        coords(x, c);
        std::int64_t idx = 0;
        for (int k = D - 1; k >= 0; --k)
            idx = idx * n_[static_cast<std::size_t>(k)] + c[static_cast<std::size_t>(k)];
        return idx;
    }

    Vec<D> origin_{};
    double edge_ = 1.0;
    std::array<std::int64_t, D> n_{};
    std::vector<std::int64_t> offsets_;
    std::vector<std::int64_t> items_;
};

/// Frozen per-particle neighbor lists with cached pair geometry and the
/// symmetrized kernel sample. Built once, immutable afterwards.
template <int D>
struct NeighborLists
{
    std::vector<std::int64_t> offsets; // size N+1
    std::vector<std::int32_t> nbr;
    std::vector<Vec<D>> r;   // r_ij = x_i - x_j
    std::vector<double> w;   // symmetrized kernel value
    std::vector<Vec<D>> grad; // symmetrized kernel gradient

    std::int64_t begin(std::int64_t i) const { return offsets[static_cast<std::size_t>(i)]; }
    std::int64_t end(std::int64_t i) const { return offsets[static_cast<std::size_t>(i) + 1]; }
    std::int64_t count(std::int64_t i) const { return end(i) - begin(i); }
    std::int64_t pairs() const { return static_cast<std::int64_t>(nbr.size()); }
};

/// Pair support test: the symmetrized kernel is nonzero iff
/// min(|G_i r|, |G_j r|) < 2, which is symmetric in i and j.
template <int D>
inline bool in_pair_support(const SmoothingTensor<D> &gi, const SmoothingTensor<D> &gj,
                            const Vec<D> &r_ij)
{
    return squared_norm(gi.g * r_ij) < 4.0 || squared_norm(gj.g * r_ij) < 4.0;
}

template <int D>
NeighborLists<D> build_neighbor_lists(const ParticleSet<D> &ps)
{
    const std::int64_t n = ps.size();
    NeighborLists<D> nl;
    nl.offsets.assign(static_cast<std::size_t>(n + 1), 0);
    if (n == 0)
        return nl;

    const CellGrid<D> grid(ps);

    std::vector<std::vector<std::int32_t>> rows(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        thread_local std::vector<std::int64_t> cand;
        grid.query(ps, i, cand);
        auto &row = rows[static_cast<std::size_t>(i)];
        for (const std::int64_t j : cand)
        {
            const Vec<D> r_ij = ps.pos[static_cast<std::size_t>(i)] - ps.pos[static_cast<std::size_t>(j)];
            if (in_pair_support(ps.smoothing[static_cast<std::size_t>(i)],
                                ps.smoothing[static_cast<std::size_t>(j)], r_ij))
                row.push_back(static_cast<std::int32_t>(j));
        }
        std::sort(row.begin(), row.end());
    });

    for (std::int64_t i = 0; i < n; ++i)
        nl.offsets[static_cast<std::size_t>(i + 1)] =
            nl.offsets[static_cast<std::size_t>(i)] +
            static_cast<std::int64_t>(rows[static_cast<std::size_t>(i)].size());

    const std::int64_t total = nl.offsets.back();
    nl.nbr.resize(static_cast<std::size_t>(total));
    nl.r.resize(static_cast<std::size_t>(total));
    nl.w.resize(static_cast<std::size_t>(total));
    nl.grad.resize(static_cast<std::size_t>(total));

    parallel_for(n, [&](std::int64_t i) {
        std::int64_t p = nl.begin(i);
        for (const std::int32_t j : rows[static_cast<std::size_t>(i)])
        {
            const Vec<D> r_ij = ps.pos[static_cast<std::size_t>(i)] - ps.pos[static_cast<std::size_t>(j)];
            const KernelSample<D> k = symmetrized_pair(ps.smoothing[static_cast<std::size_t>(i)],
                                                       ps.smoothing[static_cast<std::size_t>(j)], r_ij);
            nl.nbr[static_cast<std::size_t>(p)] = j;
            nl.r[static_cast<std::size_t>(p)] = r_ij;
            nl.w[static_cast<std::size_t>(p)] = k.value;
            nl.grad[static_cast<std::size_t>(p)] = k.gradient;
            ++p;
        }
    });
    return nl;
}

} // namespace asph

#endif
