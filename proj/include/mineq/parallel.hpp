#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mineq {

// Runs fn(i) for i in [0, count). Work is split into fixed contiguous blocks,
// one per worker, so results written to slot i never depend on how many
// threads ran or how they were scheduled.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex mu;
  std::exception_ptr first_error;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      const std::size_t lo = t * count / workers;
      const std::size_t hi = (t + 1) * count / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mineq
