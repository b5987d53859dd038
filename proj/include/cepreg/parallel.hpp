#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace cepreg {

/// Caps the number of worker threads used by every parallel loop (0 keeps the
/// runtime default).
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, n). Work items must write only to their own slot.
/// If any item throws, the exception from the lowest index is rethrown after
/// the loop, so failures are reported independently of the schedule.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n > 0 ? n : 0));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace cepreg
