#include "bubblelab/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bubblelab {

namespace {
int g_workers = -1;

int default_workers() {
    if (const char* env = std::getenv("BUBBLELAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}
}  // namespace

int worker_count() {
    if (g_workers <= 0) g_workers = default_workers();
    return g_workers;
}

void set_worker_count(int n) { g_workers = n > 0 ? n : 1; }

bool detail::use_parallel() {
#ifdef _OPENMP
    return worker_count() > 1;
#else
    return false;
#endif
}

}  // namespace bubblelab
