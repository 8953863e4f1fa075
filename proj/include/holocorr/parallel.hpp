#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace holocorr {

/// Thread count from HOLOCORR_THREADS, 1 when unset or malformed.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("HOLOCORR_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return 1;
}

/// Runs body(begin, end) over [0, n) split into contiguous static chunks.
/// The first exception thrown by any chunk is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (n == 0) return;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
  if (threads == 1 || n < 256) {
    body(std::size_t{0}, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation. The recursion shape depends only on the length.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Sum of term(i) for i in [0, n) with a fixed reduction tree: fixed-size
/// blocks are pairwise-summed, then the block totals are pairwise-summed.
/// The result is bit-identical for every thread count.
template <class Term>
double deterministic_sum(std::size_t n, unsigned threads, Term&& term) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> totals(blocks, 0.0);
  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> scratch;
    scratch.reserve(kBlock);
    for (std::size_t b = b0; b < b1; ++b) {
      scratch.clear();
      const std::size_t end = std::min(n, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) scratch.push_back(term(i));
      totals[b] = pairwise_sum(scratch);
    }
  });
  return pairwise_sum(totals);
}

}  // namespace holocorr
