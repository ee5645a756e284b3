#include "hostforge/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hostforge {

namespace {

int default_workers() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("HOSTFORGE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = cap;
    } catch (const std::exception&) {
      // Ignore malformed values.
    }
  }
  return n < 1 ? 1 : n;
}

std::atomic<int>& workers() {
  static std::atomic<int> w{default_workers()};
  return w;
}

}  // namespace

int worker_count() { return workers().load(std::memory_order_relaxed); }

void set_worker_count(int n) {
  workers().store(n < 1 ? default_workers() : n, std::memory_order_relaxed);
}

bool has_openmp() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace hostforge
