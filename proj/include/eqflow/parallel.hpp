#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include "eqflow/common.hpp"

namespace eqflow {

// Runs fn(0..n-1) on up to `jobs` worker threads. Items must write
// disjoint slots; results are then independent of the schedule, so a
// run is reproducible for any jobs value.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  require(n >= 0, "parallel_for: negative count");
  require(jobs >= 1, "parallel_for: jobs must be >= 1");
  if (jobs == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int workers = std::min(jobs, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace eqflow
