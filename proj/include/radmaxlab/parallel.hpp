#pragma once

#include <cstdint>

#ifdef RADMAXLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace radmaxlab {

/// Thread budget: OpenMP's maximum, capped by RADMAXLAB_THREADS when set.
int max_threads();

/// Runs body(i) for i in [0, n). Iterations must be independent.
template <class Body>
void parallel_for(std::int64_t n, Body&& body) {
#ifdef RADMAXLAB_HAVE_OPENMP
  const int threads = max_threads();
  if (threads > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace radmaxlab
