#ifndef TWINISLE_PARALLEL_HPP
#define TWINISLE_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace twinisle {

/// Worker cap: TWIN_ISLE_THREADS environment variable, 0 or unset = auto.
inline unsigned thread_count() {
  if (const char* env = std::getenv("TWIN_ISLE_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n). Work is dealt in contiguous blocks; callers
/// must write results into per-index slots so the output is identical to a
/// sequential run regardless of the worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace twinisle

#endif
