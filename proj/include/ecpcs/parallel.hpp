#pragma once

#include <cstddef>

// Thin OpenMP shims so the library builds and runs unchanged without OpenMP.

#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
#endif

namespace ecpcs {

inline int max_threads() { return omp_get_max_threads(); }

// Parallel kernels fall back to the serial path below this many work items;
// the fork/join overhead dominates otherwise.
inline constexpr std::size_t kParallelGrainSize = 1 << 14;

}  // namespace ecpcs
