#ifndef VARHORSE_PARALLEL_HPP
#define VARHORSE_PARALLEL_HPP

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace varhorse {

// Global worker-count request. 0 = library default. The parallel kernels write
// per-index results into preallocated slots and reduce serially in index order,
// so results are bitwise identical for any thread count.
inline int& max_threads_ref() {
    static int n = 0;
    return n;
}

inline void set_max_threads(int n) { max_threads_ref() = n; }

inline int resolved_threads() {
#ifdef _OPENMP
    int req = max_threads_ref();
    return req > 0 ? req : omp_get_max_threads();
#else
    return 1;
#endif
}

// Parallel index sweep; body must only touch state owned by its index.
template <typename Fn>
void for_each_index(std::int64_t n, Fn&& body) {
#ifdef _OPENMP
    int threads = resolved_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) body(i);
#else
    for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference sweep, kept for testing the parallel path against.
template <typename Fn>
void for_each_index_serial(std::int64_t n, Fn&& body) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

enum class Exec { serial, parallel };

template <typename Fn>
void sweep(Exec exec, std::int64_t n, Fn&& body) {
    if (exec == Exec::parallel)
        for_each_index(n, body);
    else
        for_each_index_serial(n, body);
}

}  // namespace varhorse

#endif
