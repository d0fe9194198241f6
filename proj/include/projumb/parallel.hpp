#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace projumb {

namespace detail {
inline thread_local bool in_parallel_region = false;
}

/// Runs fn(i) for i in [0, n) on a small thread pool. Callers write results
/// into slot i, so the output does not depend on scheduling. The first
/// exception thrown by any task is rethrown. Nested calls run serially.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n);
  if (workers <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = detail::in_parallel_region;
    detail::in_parallel_region = true;
    struct Reset {
      bool v;
      ~Reset() { detail::in_parallel_region = v; }
    } reset{outer};
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace projumb
