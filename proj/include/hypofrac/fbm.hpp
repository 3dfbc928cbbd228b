#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/parallel.hpp"

namespace hypofrac::fbm {

enum class Method { cholesky, volterra };

std::string to_string(Method m);
Method parse_method(const std::string& name);

/// One sampled d-dimensional trajectory. Column k holds B(t_k); column 0 is zero.
struct FbmPath {
  Hurst hurst;
  TimeGrid grid;
  Mat values;
  std::uint64_t seed = 0;
  Method method = Method::cholesky;
  std::size_t path_id = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.rows()); }
  /// Increment B^i(t_{k+1}) - B^i(t_k).
  double increment(std::size_t i, std::size_t k) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k + 1)) -
           values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }
};

/// R(t, s) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2. Accepts any H in (0, 1).
double covariance(double hurst, double t, double s);

/// Volterra kernel K(t, s) normalised so that int_0^t K(t, u)^2 du = t^{2H}.
double volterra_kernel(Hurst h, double t, double s);

/// Normalising constant of the Volterra kernel, obtained by quadrature of the
/// variance identity at t = 1.
double volterra_constant(Hurst h);

/// Exact Gaussian sampler: factorises [R(t_i, t_j)]_{i,j>=1} once.
class CholeskySampler {
 public:
  CholeskySampler(Hurst h, TimeGrid grid);

  FbmPath sample_one(std::size_t dim, std::size_t replica, std::uint64_t seed) const;
  std::vector<FbmPath> sample(std::size_t dim, std::size_t n_paths, std::uint64_t seed,
                              Exec exec = default_exec()) const;

  const Mat& factor() const noexcept { return lower_; }
  Hurst hurst() const noexcept { return hurst_; }
  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  Hurst hurst_;
  TimeGrid grid_;
  Mat lower_;
};

/// Left-Riemann discretisation of B_t = int_0^t K(t, s) dW_s on the same grid,
/// with kernel rows renormalised so each marginal variance equals t^{2H}.
class VolterraSampler {
 public:
  VolterraSampler(Hurst h, TimeGrid grid);

  FbmPath sample_one(std::size_t dim, std::size_t replica, std::uint64_t seed) const;
  std::vector<FbmPath> sample(std::size_t dim, std::size_t n_paths, std::uint64_t seed,
                              Exec exec = default_exec()) const;

  /// Row i-1 holds the weights producing B(t_i) from the Wiener increments.
  const Mat& weights() const noexcept { return weights_; }

 private:
  Hurst hurst_;
  TimeGrid grid_;
  Mat weights_;
};

std::vector<FbmPath> sample_cholesky(Hurst h, const TimeGrid& grid, std::size_t dim,
                                     std::size_t n_paths, std::uint64_t seed,
                                     Exec exec = default_exec());
std::vector<FbmPath> sample_volterra(Hurst h, const TimeGrid& grid, std::size_t dim,
                                     std::size_t n_paths, std::uint64_t seed,
                                     Exec exec = default_exec());

/// Increment variance f(s, t) = E(B(t) - B(s))^2 together with the declared index.
struct CovarianceModel {
  double declared_hurst;
  std::function<double(double, double)> f;

  static CovarianceModel exact(Hurst h);
};

struct TypeHReport {
  double c1 = 0.0;  // min f / |t-s|^{2H}
  double c2 = 0.0;  // max f / |t-s|^{2H}
  double c3 = 0.0;  // max |d_s d_t f| / |t-s|^{2H-2}
  double variance_exponent = 0.0;   // fitted slope of log f against log |t-s|
  double mixed_exponent = 0.0;      // fitted slope of log |d_s d_t f|; NaN if it vanishes
  std::size_t pairs = 0;
  bool pass = false;
};

/// Checks the two-sided bound on f and the mixed-derivative bound over the
/// supplied pairs. The mixed derivative uses a central stencil of width |t-s|/100.
TypeHReport check_type_h(const CovarianceModel& model,
                         std::span<const std::pair<double, double>> pairs,
                         double exponent_tolerance = 0.05);

}  // namespace hypofrac::fbm
