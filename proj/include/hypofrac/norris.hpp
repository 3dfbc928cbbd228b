#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/fbm.hpp"
#include "hypofrac/parallel.hpp"
#include "hypofrac/poly.hpp"

namespace hypofrac::norris {

/// Fine scale delta and coarse scale Delta with 1/delta, 1/Delta integers and
/// (1/Delta) | (1/delta).
struct CoarseQvConfig {
  double delta = 1.0 / 256;
  double Delta = 1.0 / 16;

  void validate() const;
  std::size_t fine_steps() const;   // 1/delta
  std::size_t blocks() const;       // 1/Delta
  std::size_t r() const;            // Delta / delta
};

struct NorrisStatistics {
  std::size_t r = 0;
  std::vector<Mat> X;           // per block, d x d
  std::vector<Vec> Y;           // per block, sqrt of the diagonal
  std::vector<Mat> Y_cross;     // per block, sqrt |X^{ij}|
  double T2 = 0.0;              // sum over a block of f(n delta, (n-1) delta)
};

/// Block sums of increment products at scale delta. The driver mesh must divide delta.
NorrisStatistics coarse_qv(const fbm::FbmPath& driver, const CoarseQvConfig& cfg);

struct TailPoint {
  double h = 0.0;
  double probability = 0.0;
};

struct ConcentrationReport {
  double delta = 0.0;
  std::size_t N = 0;            // increments per block
  double T = 0.0;
  std::size_t samples = 0;
  double rate = 0.0;            // fitted kappa in P(||X| - T| >= h) ~ exp(-kappa h^2)
  double rate_stderr = 0.0;
  std::size_t fit_points = 0;
  double predicted_scale = 0.0; // N / (delta N)^{2H}
  std::vector<TailPoint> tail;        // ||X| - T| >= h
  std::vector<TailPoint> cross_tail;  // |<X^1, X^2>| >= h^2
};

/// Tail curves of the block norms of a d-dimensional (d >= 2) exact fBm at
/// the given scales; fits log P = c - kappa h^2 for P in [p_lo, p_hi].
ConcentrationReport concentration_experiment(Hurst h, const CoarseQvConfig& cfg,
                                             std::size_t n_paths, std::uint64_t seed,
                                             double p_lo = 1e-3, double p_hi = 1e-1,
                                             Exec exec = default_exec());

struct ScalingReport {
  ConcentrationReport base;     // (delta, N)
  ConcentrationReport refined;  // (delta / 2, 2N)
  double observed_ratio = 0.0;
  double predicted_ratio = 0.0;
  double relative_error = 0.0;
  bool pass = false;
};

ScalingReport concentration_scaling(Hurst h, const CoarseQvConfig& base, std::size_t n_paths,
                                    std::uint64_t seed, double tolerance = 0.3,
                                    Exec exec = default_exec());

struct HsReport {
  std::vector<std::size_t> N;
  std::vector<double> delta;
  std::vector<double> hs2;             // ||Gamma||_HS^2
  std::vector<double> hs2_normalised;  // ||Gamma||_HS^2 / delta^{4H}
  double diagonal = 0.0;               // Gamma_nn at the first N (equals delta^{2H})
  double slope = 0.0;                  // of log(hs2_normalised) vs log N
  double raw_slope = 0.0;              // of log(hs2) vs log N at fixed delta N
  double predicted = 0.0;              // 4H - 2
  bool pass = false;
};

/// Exact increment covariance Gamma_{mn} assembled from R(t, s) for each N
/// at fixed delta N = span.
HsReport hs_bound_check(Hurst h, const std::vector<std::size_t>& Ns = {64, 128, 256, 512},
                        double span = 1.0 / 16, double tolerance = 0.3);

struct ScaleChoice {
  double eps = 0.0;
  double gamma = 0.0;
  double delta = 0.0;   // admissible, rounded down
  double Delta = 0.0;   // admissible, rounded up
  double delta_exact = 0.0;
  double Delta_exact = 0.0;
  double alpha = 0.0;
  bool degenerate = false;
};

ScaleChoice scale_choices(double eps, Hurst h);

/// Limiting exponent H(1-H)/((1+H)(2-H)).
double alpha_limit(double hurst);

enum class Scenario { pure_noise, pure_drift, degenerate, pullback, pullback_integral };
std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

struct SweepRow {
  double q = 0.0;
  double eps = 0.0;
  std::size_t hits = 0;
  double probability = 0.0;
  double wilson_upper = 0.0;
};

struct SweepReport {
  Scenario scenario = Scenario::pullback;
  double hurst = 0.0;
  std::vector<double> eps_grid;
  std::vector<double> q_grid;
  std::vector<SweepRow> rows;   // max over probe combinations for pullback scenarios
  double q_hat = 0.0;           // largest q with zero hits at every eps (0 if none)
  double q_hat_wilson = 0.0;    // same with the Wilson upper bound < 1/n rule
  double alpha = 0.0;
  std::vector<ScaleChoice> scales;
  std::size_t combinations = 1;
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
};

struct SweepConfig {
  std::vector<double> eps_grid{1e-1, 1e-2, 1e-3};
  std::vector<double> q_grid;   // empty: 0.05, 0.10, ..., 1.00
  std::size_t n_paths = 10000;
  std::size_t n_steps = 256;
  std::uint64_t seed = 1;
  std::size_t random_directions = 4;
};

/// Empirical P(||y|| < eps and ||a|| + ||b|| > eps^q). Pullback scenarios use
/// `sys` (defaults to the Heisenberg system when d = 0), started at its x0.
SweepReport norris_sweep(Scenario scenario, Hurst h, const SweepConfig& cfg,
                         const poly::VectorFieldSystem& sys = {}, Exec exec = default_exec());

/// Wilson score upper bound at z = 1.96.
double wilson_upper(std::size_t hits, std::size_t n, double z = 1.96);

}  // namespace hypofrac::norris
