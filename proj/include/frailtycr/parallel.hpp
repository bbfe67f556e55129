#pragma once

#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace frailtycr {

// 0 or negative requests the hardware default.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs chunk_fn(begin, end, chunk_index) over a fixed partition of [0, n).
// The partition depends only on (n, threads), so any per-index work keyed by
// index stays reproducible.
inline void parallel_chunks(long n, int threads,
                            const std::function<void(long, long, int)>& chunk_fn) {
  threads = resolve_threads(threads);
  if (n <= 0) return;
  const int used = static_cast<int>(std::min<long>(threads, n));
  if (used <= 1) {
    chunk_fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  const long per = n / used, extra = n % used;
  long begin = 0;
  for (int c = 0; c < used; ++c) {
    const long len = per + (c < extra ? 1 : 0);
    pool.emplace_back(chunk_fn, begin, begin + len, c);
    begin += len;
  }
  for (auto& th : pool) th.join();
}

// Fixed-order pairwise reduction; independent of thread count by construction.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace frailtycr
