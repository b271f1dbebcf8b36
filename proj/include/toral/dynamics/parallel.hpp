#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace toral {

/// Worker count for the dynamics routines; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(chunk, begin, end) over `chunks` equal contiguous pieces of [0, n).
/// The partition depends only on n and chunks, never on the worker count, so
/// per-chunk results merged in chunk order are reproducible.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunks, Fn&& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(chunks));
  auto range = [&](std::size_t c) {
    return std::pair<std::size_t, std::size_t>{n * c / chunks, n * (c + 1) / chunks};
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const auto [b, e] = range(c);
      fn(c, b, e);
    }
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        const auto [b, e] = range(c);
        fn(c, b, e);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace toral
