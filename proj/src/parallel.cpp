#include "modesift/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace modesift {

int resolve_thread_count(int requested) {
  if (const char* env = std::getenv("MODESIFT_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  if (requested > 0) return requested;
  return omp_get_num_procs();
}

ScopedThreadCount::ScopedThreadCount(int threads) : previous_(omp_get_max_threads()) {
  if (threads > 0) omp_set_num_threads(threads);
}

ScopedThreadCount::~ScopedThreadCount() { omp_set_num_threads(previous_); }

}  // namespace modesift
