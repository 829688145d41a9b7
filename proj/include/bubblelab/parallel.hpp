#pragma once
//
// Thin OpenMP wrapper for the data-parallel kernels (dense sign scans, batch
// equilibrium solves, Gram-matrix assembly). Every parallel kernel has a
// serial twin used as the reference in tests and in the kernel benchmark;
// worker count 1 always takes the serial path.
//
#include <cstddef>

namespace bubblelab {

// Number of workers used by parallel_for. Defaults to the OpenMP max
// (or 1 without OpenMP); BUBBLELAB_THREADS overrides at first use.
int worker_count();
void set_worker_count(int n);

namespace detail {
bool use_parallel();
}

template <class F>
void serial_for(std::ptrdiff_t n, F&& body) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
    if (!detail::use_parallel() || n < 64) {
        serial_for(n, body);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#else
    serial_for(n, body);
#endif
}

}  // namespace bubblelab
