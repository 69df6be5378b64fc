#include "weasl/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weasl::parallel {

namespace {
std::atomic<int> g_threads{0};
}

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n); }

int threads() {
    const int n = g_threads.load();
    if (n > 0) return n;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {
bool use_openmp(std::size_t blocks) {
#ifdef _OPENMP
    return blocks > 1 && threads() > 1 && !omp_in_parallel();
#else
    (void)blocks;
    return false;
#endif
}
}  // namespace detail

}  // namespace weasl::parallel
