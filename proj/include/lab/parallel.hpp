#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace lab {

// Run body(i) for i in [0, n) across `workers` threads. Indices are handed
// out through a shared atomic counter, so the set of executed indices (and
// therefore any per-index output array) is identical for every worker count;
// callers must write results only to their own index's slot. The first
// exception thrown by any worker is rethrown after all threads join.
template <typename F>
void parallel_for(size_t n, unsigned workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) {
          error = std::current_exception();
        }
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = workers < n ? workers : static_cast<unsigned>(n);
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lab
