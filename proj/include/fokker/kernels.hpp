#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <utility>

namespace fokker {

/// Loop driver for the data-parallel kernels. `serial` is the reference
/// path kept for testing; `parallel` runs the same per-index body under
/// OpenMP. Bodies write into per-index slots and callers reduce serially,
/// so both paths give bit-identical results.
enum class Execution { serial, parallel };

template <class Body>
void for_each_index(Execution exec, std::size_t n, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  // Exceptions cannot cross the parallel region; keep the one from the
  // lowest index so the error reported matches the serial path.
  std::exception_ptr failure;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fokker_kernel_failure)
      {
        if (static_cast<std::size_t>(i) < failed_at) {
          failed_at = static_cast<std::size_t>(i);
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fokker
