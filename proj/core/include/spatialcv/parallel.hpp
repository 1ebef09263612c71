#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace spcv {

/// Parallel-map capability handed to the analysis routines. Work items are
/// identified by index and every routine writes results into index-addressed
/// slots, so output never depends on the thread count or scheduling.
struct Parallel {
  int threads = 1;

  template <class F>
  void for_each_index(std::size_t n, F&& body) const {
    const std::size_t workers = std::min<std::size_t>(threads > 1 ? threads : 1, n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::atomic<bool> failed{false};
    auto run = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n || failed.load(std::memory_order_relaxed)) return;
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers - 1);
      for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
      run();
    }
    // Rethrow the failure with the lowest index so error reporting matches a
    // serial run as closely as possible.
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
};

}  // namespace spcv
