#pragma once

namespace modesift {

// Number of worker threads to use: MODESIFT_THREADS if set and positive,
// otherwise `requested` if positive, otherwise the processor count.
int resolve_thread_count(int requested = 0);

// Sets the OpenMP team size for the lifetime of the object.
class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(int threads);
  ~ScopedThreadCount();
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  int previous_;
};

}  // namespace modesift
