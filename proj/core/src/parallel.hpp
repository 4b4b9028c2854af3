#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spectral::detail {

/// Runs fn(block) for every block in [0, n_blocks) on up to `workers` threads.
template <typename Fn>
void parallel_blocks(std::size_t n_blocks, unsigned workers, Fn fn) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(n_blocks, 1)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < n_blocks; b = next++) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace spectral::detail
