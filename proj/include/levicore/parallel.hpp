#pragma once

#include <cstddef>
#include <exception>

#ifdef LEVICORE_HAVE_OPENMP
#include <omp.h>
#endif

namespace levicore::par {

// Global switch used by tests and the benchmark to force the serial
// reference path. Parallel loops write per-index results only; any
// reduction happens serially afterwards, so results are identical
// for every thread count.
inline bool& serial_mode() {
  static bool s = false;
  return s;
}

inline int max_threads() {
#ifdef LEVICORE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef LEVICORE_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <class F>
void for_index(std::size_t n, F&& f) {
  if (serial_mode()) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef LEVICORE_HAVE_OPENMP
  // exceptions must not unwind through the parallel region; the first one
  // (lowest index) is rethrown afterwards so behavior matches the serial path
  std::exception_ptr err;
  long long errIdx = -1;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i) {
    try {
      f((std::size_t)i);
    } catch (...) {
#pragma omp critical(levicore_for_index_err)
      if (errIdx < 0 || i < errIdx) {
        err = std::current_exception();
        errIdx = i;
      }
    }
  }
  if (err) std::rethrow_exception(err);
#else
  for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

}  // namespace levicore::par
