#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace bsq {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Callers write
/// results into pre-sized slots, so the outcome is order independent.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int nt = std::min<int>(threads, static_cast<int>(n));
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace bsq
