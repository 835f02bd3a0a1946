#ifndef FLOWLAB_PARALLEL_HPP
#define FLOWLAB_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flowlab {

/// Execution policy for the batch kernels.  Every kernel has one code path
/// per policy over the *same* per-item function, so outputs are bit-identical:
/// item i writes slot i and reductions run afterwards in index order.
enum class Exec { serial, openmp };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class Fn>
void par_for(Exec exec, int threads, std::ptrdiff_t n, Fn&& fn) {
    if (exec == Exec::openmp) {
#ifdef _OPENMP
        if (threads <= 0) threads = hardware_threads();
        std::exception_ptr err = nullptr;
        std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                fn(i);
            } catch (...) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true))
                    err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        return;
#endif
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
}

}  // namespace flowlab

#endif
