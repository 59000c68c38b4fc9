#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rte {

/// Worker count from RTE_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("RTE_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(k) for k in [0, n) on `workers` threads with a strided split.
/// Each index is processed exactly once, so results written per index do not
/// depend on the worker count. The first exception (lowest index) is rethrown.
inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  workers = std::clamp(workers <= 0 ? default_workers() : workers, 1, std::max(1, n));
  if (workers == 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::mutex mu;
  int failed_at = n;
  std::exception_ptr failure;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < n; k += workers) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(mu);
          if (k < failed_at) {
            failed_at = k;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rte
