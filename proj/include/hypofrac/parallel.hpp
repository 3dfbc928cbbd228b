#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace hypofrac {

/// Execution mode for the data-parallel kernels. `serial` is the reference
/// path used by the test-suite to check the OpenMP path element for element.
enum class Exec { serial, parallel };

/// Current default mode (parallel unless changed).
Exec default_exec() noexcept;
void set_default_exec(Exec exec) noexcept;

/// Worker count for OpenMP regions. Never affects results.
void set_threads(int n);
int threads() noexcept;

/// Runs body(i) for i in [0, n). In parallel mode iterations are distributed
/// over the pool; the first exception thrown by any iteration is rethrown
/// after the loop.
template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hypofrac
