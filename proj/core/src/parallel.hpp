#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mdke::detail {

// Runs fn(k) for k in [0, n) on up to `threads` workers with a static
// strided partition. Callers must make fn(k) independent of fn(j).
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) fn(k);
    });
}

}  // namespace mdke::detail
