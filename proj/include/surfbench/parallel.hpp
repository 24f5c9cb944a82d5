#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace surfbench {

/// Worker count used by the per-point and per-view loops (default 1).
int thread_count();
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n) over contiguous chunks. Each i must write only
/// its own output slot, so results never depend on scheduling.
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = n * w / workers, end = n * (w + 1) / workers;
    pool.emplace_back([&fn, begin, end] {
      for (std::int64_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace surfbench
