#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/holder.hpp"
#include "hypofrac/parallel.hpp"

// Riemann-Liouville operators on sampled paths and the Cameron-Martin inner
// product. Elements of H are piecewise constant on grid cells, cell k carrying
// the left value at t_k; the value at the final node is ignored.
namespace hypofrac::frac {

using holder::SampledPath;

/// I^alpha phi at the grid nodes, exact for piecewise constant phi.
SampledPath frac_integral(const SampledPath& phi, double alpha, Exec exec = default_exec());

/// D^alpha f = d/dt I^{1-alpha} f. The inner integral is exact for the
/// piecewise linear interpolant; the outer derivative is a backward difference
/// (forward at t = 0). Warns when f(0) != 0.
SampledPath frac_derivative(const SampledPath& f, double alpha,
                            std::vector<std::string>* warnings = nullptr,
                            Exec exec = default_exec());

/// Right-sided Marchaud derivative with f extended by zero past the horizon.
/// Exact for piecewise linear f; the tail beyond the horizon is closed form.
SampledPath frac_derivative_minus(const SampledPath& f, double alpha, Exec exec = default_exec());

/// w[k] = H(2H-1) * mass of |s-t|^{2H-2} over two cells at lag k,
/// i.e. mesh^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
std::vector<double> cell_masses(Hurst h, std::size_t cells, double mesh);

/// Singular-kernel form H(2H-1) int int |s-t|^{2H-2} <phi(s), psi(t)> ds dt.
double h_inner_kernel(const SampledPath& phi, const SampledPath& psi, Hurst h,
                      Exec exec = default_exec());

struct FracInner {
  double value = 0.0;       // total, including the tail beyond the horizon
  double tail = 0.0;        // closed-form contribution of [horizon, inf)
  double remainder = 0.0;   // bound on the neglected terms of the tail series
  double horizon = 0.0;     // absolute truncation point
};

/// <I^{H-1/2} phi, I^{H-1/2} psi>_{L^2(0, inf)} with zero extension. The
/// integral over [0, horizon * T] uses the trapezoid rule on the extended grid;
/// the rest is summed from the multipole expansion of the kernel.
FracInner h_inner_frac_report(const SampledPath& phi, const SampledPath& psi, Hurst h,
                              double horizon = 8.0, Exec exec = default_exec());

double h_inner_frac(const SampledPath& phi, const SampledPath& psi, Hurst h,
                    double horizon = 8.0, Exec exec = default_exec());

struct NormBoundReport {
  double h_norm = 0.0;
  double sup = 0.0;
  double gamma_norm = 0.0;  // Holder seminorm + sup norm
  double ratio = 0.0;       // h_norm * gamma_norm^{2+1/g} / sup^{3+1/g}
  bool zero_path = false;
  std::string convention = "gamma norm = holder seminorm + sup norm";
};

/// Seeded test pairs on [0, 1]: even indices are trigonometric sums, odd
/// indices indicator functions of random node-aligned intervals.
std::vector<std::pair<SampledPath, SampledPath>> pair_corpus(std::size_t n_steps, std::size_t pairs,
                                                             std::uint64_t seed);

struct ReprhRow {
  double kernel = 0.0;
  double frac = 0.0;
  double scale = 0.0;      // ||phi||_H ||psi||_H from the kernel form
  double rel_error = 0.0;  // |kernel - frac| / (scale + 1e-12)
};

struct ReprhReport {
  double hurst = 0.0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  std::vector<ReprhRow> rows;
  double max_rel_error = 0.0;
};

ReprhReport check_reprh(Hurst h, std::size_t n_steps, std::size_t pairs, std::uint64_t seed,
                        Exec exec = default_exec());

NormBoundReport h_norm_lower_bound(const SampledPath& f, Hurst h, double gamma,
                                   Exec exec = default_exec());

}  // namespace hypofrac::frac
