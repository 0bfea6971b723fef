#pragma once
#include <functional>
#include <thread>
#include <vector>

namespace qw {

// Runs fn(i) for i in [0, n) across at most `workers` threads, splitting
// the index range into one contiguous chunk per thread. Callers that
// accumulate must do so per chunk and reduce in chunk order so results
// are identical for a fixed worker count.
inline void parallel_for(int n, int workers,
                         const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nw = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    const int lo = static_cast<int>(static_cast<long>(n) * w / nw);
    const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / nw);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qw
