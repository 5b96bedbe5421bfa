#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace flix::detail {

/// Intra-round worker cap: FLIX_THREADS if set (clamped to [1, 64]),
/// otherwise the hardware concurrency. Outputs are identical for any value
/// because callers always reduce per-client results in fixed client order.
inline int max_threads() {
  if (const char* env = std::getenv("FLIX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v > 64 ? 64 : v);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw > 64 ? 64 : hw);
}

/// Runs fn(i) for i in [0, count). Parallelizes over contiguous chunks when
/// the task count justifies it; fn must write only to its own slot i.
template <typename Fn>
void for_each_index(int count, Fn&& fn) {
  const int threads = max_threads();
  // Thread spawns cost more than a desk-scale client loop; stay serial for
  // small sweeps.
  if (threads <= 1 || count < 2 * threads || count < 16) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = begin + chunk < count ? begin + chunk : count;
    if (begin >= end) break;
    workers.emplace_back([begin, end, &fn] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& w : workers) w.join();
}

}  // namespace flix::detail
