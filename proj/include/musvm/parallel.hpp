#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "musvm/types.hpp"

namespace musvm {

/// Process-wide worker count used by parallel_for. Values < 1 are clamped to 1.
void set_thread_count(int threads);
int thread_count();

namespace detail {
/// Set inside parallel_for workers; nested calls then run serially.
inline thread_local bool in_parallel_region = false;
}

/// Runs body(i) for i in [0, n) over a static partition of indices. Each index
/// is visited exactly once, so results written per index do not depend on the
/// thread count. The exception from the lowest failing chunk is rethrown.
template <typename Body>
void parallel_for(Index n, Body&& body) {
  const Index workers = detail::in_parallel_region ? 1 : std::min<Index>(thread_count(), n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_parallel_region = true;
      try {
        for (Index i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace musvm
