#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace frd {

/// Runs fn(begin, end) over a partition of [0, n) into contiguous chunks,
/// one chunk per worker. Chunk boundaries depend only on n and the worker
/// count, and every chunk writes to disjoint output slots, so results are
/// reproducible for any worker count. The first worker exception (in chunk
/// order) is rethrown after all threads join.
inline void parallel_for(std::int64_t n, int workers,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    fn(0, n);
    return;
  }
  const int nw = static_cast<int>(std::min<std::int64_t>(workers, n));
  const std::int64_t chunk = (n + nw - 1) / nw;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors;
  pool.reserve(nw);
  errors.resize(nw);
  for (int w = 0; w < nw; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, &errors, w, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Ordered reduction helper: partial results are produced per chunk and
/// combined in chunk order, independent of thread scheduling.
template <typename T>
T parallel_reduce(std::int64_t n, int workers, T init,
                  const std::function<T(std::int64_t, std::int64_t)>& chunk_fn,
                  const std::function<T(T, T)>& combine) {
  if (n <= 0) return init;
  const int nw = workers <= 1 ? 1 : static_cast<int>(std::min<std::int64_t>(workers, n));
  const std::int64_t chunk = (n + nw - 1) / nw;
  std::vector<T> partial;
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  for (int w = 0; w < nw; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
    if (lo >= hi) break;
    ranges.emplace_back(lo, hi);
  }
  partial.resize(ranges.size(), init);
  if (nw == 1) {
    partial[0] = chunk_fn(ranges[0].first, ranges[0].second);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < ranges.size(); ++i)
      pool.emplace_back([&, i] { partial[i] = chunk_fn(ranges[i].first, ranges[i].second); });
    for (auto& t : pool) t.join();
  }
  T acc = init;
  for (const auto& p : partial) acc = combine(acc, p);
  return acc;
}

}  // namespace frd
