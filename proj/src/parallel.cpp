#include "radmaxlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace radmaxlab {

int max_threads() {
  int threads = 1;
#ifdef RADMAXLAB_HAVE_OPENMP
  threads = omp_get_max_threads();
#endif
  if (const char* cap = std::getenv("RADMAXLAB_THREADS")) {
    try {
      const int requested = std::stoi(cap);
      if (requested >= 1) threads = std::min(threads, requested);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return std::max(threads, 1);
}

}  // namespace radmaxlab
