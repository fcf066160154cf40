// OpenMP-backed parallel loop with a serial reference path. Results must be
// written by index so worker count never changes the output.
#pragma once

#include <cstdint>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tfmm {

// Worker count: TFMM_WORKERS env var when set, otherwise the OpenMP
// default (1 without OpenMP).
inline int default_workers() {
    if (const char* env = std::getenv("TFMM_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// fn(i) for i in [0, n); workers == 1 runs the plain serial loop.
template <typename F>
void parallel_for(std::int64_t n, int workers, F&& fn) {
#ifdef _OPENMP
    if (workers != 1 && n > 1) {
        if (workers < 1) workers = default_workers();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    (void)workers;
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

} // namespace tfmm
