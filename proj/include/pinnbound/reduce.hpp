#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace pinnbound {

/// Pairwise (tree) sum over a contiguous range. The tree shape depends only on
/// the length, so results do not depend on how the terms were produced.
template <typename T>
T pairwise_sum(std::span<const T> terms) {
  const std::size_t n = terms.size();
  if (n == 0) return T{};
  if (n == 1) return terms[0];
  if (n == 2) return T(terms[0] + terms[1]);
  const std::size_t half = n / 2;
  return T(pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half)));
}

template <typename T>
T pairwise_sum(const std::vector<T>& terms) {
  return pairwise_sum(std::span<const T>(terms.data(), terms.size()));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// visited exactly once; callers write into per-index slots and reduce later.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace pinnbound
