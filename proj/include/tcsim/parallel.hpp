#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>

namespace tcsim {

/// Selects the serial reference loop or the OpenMP loop for data-parallel kernels.
enum class Exec { serial, parallel };

void set_thread_count(int n);
int thread_count();

// Runs f(i) for i in [0, n). Exceptions from workers are rethrown after the
// loop; the one from the lowest index wins so failures are reproducible.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::size_t err_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(tcsim_for_each_index)
      {
        if (static_cast<std::size_t>(i) < err_index) {
          err_index = static_cast<std::size_t>(i);
          err = std::current_exception();
        }
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace tcsim
