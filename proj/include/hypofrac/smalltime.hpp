#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/fbm.hpp"
#include "hypofrac/holder.hpp"
#include "hypofrac/parallel.hpp"
#include "hypofrac/poly.hpp"

namespace hypofrac::smalltime {

/// Letters are 1-based noise indices.
using Word = std::vector<unsigned>;

struct IteratedIntegralTable {
  std::size_t d = 0;
  std::size_t K = 0;
  double horizon = 0.0;
  std::map<Word, double> values;   // every word of length 1..K

  double at(const Word& w) const;
};

/// Nested Riemann-Stieltjes recursion: the running integral of (I, i) is the
/// integral of the running integral of I against dB^i. K <= 4.
IteratedIntegralTable iterated_integrals(const TimeGrid& grid, const Mat& path, std::size_t K,
                                         holder::Rule rule = holder::Rule::left);
IteratedIntegralTable iterated_integrals(const fbm::FbmPath& driver, std::size_t K,
                                         holder::Rule rule = holder::Rule::left);

/// Number of descents of a permutation in one-line notation (1-based values).
std::size_t raising_count(const std::vector<unsigned>& sigma);

struct LogSignature {
  std::map<Word, double> values;
  std::size_t K = 0;

  double at(const Word& w) const;
};

/// Lambda_I = sum_sigma (-1)^{e(sigma)} / (k^2 C(k-1, e(sigma))) int dB^{sigma^{-1} I},
/// with (sigma I)_j = i_{sigma(j)}.
LogSignature log_signature(const IteratedIntegralTable& table);

/// The field sum_{|I| <= N} Lambda_I V_I (diffusion words only).
poly::VectorField chen_field(const poly::VectorFieldSystem& sys, const LogSignature& ls, std::size_t N);

/// Time-one flow of the Chen field from x0 by adaptive RK4 with step doubling.
Vec chen_approximation(const poly::VectorFieldSystem& sys, const Vec& x0, const fbm::FbmPath& driver,
                       std::size_t N, holder::Rule rule = holder::Rule::trapezoid, double tol = 1e-12);

Vec flow_unit_time(const poly::VectorField& w, const Vec& x0, double tol = 1e-12);

struct DensityPoint {
  double t = 0.0;
  double kde = 0.0;
  double kde_se = 0.0;
  double knn = 0.0;
  std::vector<double> bandwidth;
};

struct DensityConfig {
  std::size_t n_paths = 200000;
  std::size_t n_steps = 64;
  std::size_t batches = 20;
  std::uint64_t seed = 1;
};

/// Endpoint density of the driftless system at x0, one independent sample of
/// X_t per path for each t. Product Gaussian KDE with per-component Silverman
/// bandwidth; the k-NN estimate (k = ceil(sqrt N)) works in standardised coordinates.
std::vector<DensityPoint> density_estimate(const poly::VectorFieldSystem& sys, const Vec& x0, Hurst h,
                                           const std::vector<double>& t_grid, const DensityConfig& cfg,
                                           Exec exec = default_exec());

/// n log-spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double chi2_dof = 0.0;
  std::size_t points = 0;
  std::vector<std::string> warnings;
};

/// Weighted least squares of log p against log t with weights (p / se)^2; the
/// slope error is inflated by sqrt(chi2/dof) when that exceeds one.
ExponentFit exponent_fit(const std::vector<double>& t, const std::vector<double>& p,
                         const std::vector<double>& se);

}  // namespace hypofrac::smalltime
