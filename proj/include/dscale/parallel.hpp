#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dscale {

/// Batch kernels (corpus verification, per-term evaluation, Monte Carlo
/// trials) come in an OpenMP path and a serial reference path. Results must be
/// bit-identical: every item's work is independent and seeded by item index.
enum class ExecPolicy { Serial, Parallel };

template <typename Fn>
void parallel_for(std::size_t n, ExecPolicy policy, Fn&& fn) {
#ifdef _OPENMP
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)policy;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace dscale
