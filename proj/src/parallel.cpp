#include "hypofrac/parallel.hpp"

#include <atomic>

#include <omp.h>

namespace hypofrac {

namespace {
std::atomic<Exec> g_exec{Exec::parallel};
}

Exec default_exec() noexcept { return g_exec.load(); }
void set_default_exec(Exec exec) noexcept { g_exec.store(exec); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int threads() noexcept { return omp_get_max_threads(); }

}  // namespace hypofrac
