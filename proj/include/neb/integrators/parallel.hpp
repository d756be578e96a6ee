#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace neb {

/// Thread count from NEB_THREADS, or the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("NEB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i, thread) for i in [0, n) on `threads` workers pulling chunks
/// from a shared counter. With one thread the order is sequential.
template <typename Body>
void parallel_for(long long n, int threads, Body&& body, long long chunk = 64) {
  if (n <= 0) return;
  if (threads <= 1) {
    for (long long i = 0; i < n; ++i) body(i, 0);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](int thread) {
    try {
      for (;;) {
        const long long begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const long long end = std::min(n, begin + chunk);
        for (long long i = begin; i < end; ++i) body(i, thread);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace neb
