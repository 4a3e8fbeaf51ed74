#ifndef VISCOBS_PARALLEL_HPP
#define VISCOBS_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace viscobs {

// Runs func(i) for i in [0, n). The OpenMP path uses a static schedule so
// every index is written by exactly one thread and results match the serial
// path bit for bit.
template <typename F>
void parallel_for(std::ptrdiff_t n, F&& func) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) func(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) func(i);
#endif
}

template <typename F>
void serial_for(std::ptrdiff_t n, F&& func) {
  for (std::ptrdiff_t i = 0; i < n; ++i) func(i);
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace viscobs

#endif
