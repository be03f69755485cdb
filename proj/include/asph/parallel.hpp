#ifndef ASPH_PARALLEL_HPP
#define ASPH_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace asph
{

/// Worker count used by all particle passes. Defaults to the OpenMP thread
/// pool capped by the ANISO_SPH_THREADS environment variable. Results are
/// independent of this value: every pass writes one disjoint slot per
/// particle and accumulates per-particle sums in fixed neighbor-list order.
inline int &worker_count_slot()
{
    static int workers = [] {
        int n = 1;
#ifdef _OPENMP
        n = omp_get_max_threads();
#endif
        if (const char *env = std::getenv("ANISO_SPH_THREADS"))
        {
            const int cap = std::atoi(env);
            if (cap > 0)
                n = std::min(n, cap);
        }
        return n;
    }();
    return workers;
}

inline int worker_count() { return worker_count_slot(); }

inline void set_worker_count(int n) { worker_count_slot() = std::max(1, n); }

template <class Body>
inline void parallel_for(std::int64_t n, const Body &body)
{
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count()) if (n > 1024 && worker_count() > 1)
#endif
    for (std::int64_t i = 0; i < n; ++i)
        body(i);
}

} // namespace asph

#endif
