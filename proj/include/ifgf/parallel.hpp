#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ifgf {

/// Thread count for a request of `requested` (<= 0 means "default": the
/// IFGF_THREADS environment variable, else hardware concurrency).
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n). Work items must write only their own output
/// slots; under that contract the result is independent of the thread count
/// and of the chunk scheduling.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunk =
      std::max<std::size_t>(1, std::min<std::size_t>(1024, n / (8u * threads) + 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t b = next.fetch_add(chunk, std::memory_order_relaxed);
        if (b >= n) break;
        const std::size_t e = std::min(n, b + chunk);
        for (std::size_t i = b; i < e; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ifgf
