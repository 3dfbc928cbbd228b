#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/fbm.hpp"
#include "hypofrac/parallel.hpp"
#include "hypofrac/poly.hpp"

namespace hypofrac::sde {

using poly::VectorFieldSystem;

enum class Scheme { euler, heun };
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

/// Solved path and, optionally, the derivative data of the discrete flow.
struct SdeSolution {
  TimeGrid grid;
  Mat X;                  // n x nodes
  std::vector<Mat> J;     // d X_k / d x0, one n x n matrix per node
  std::vector<Mat> Jinv;  // inverses, propagated by their own recursion
  std::vector<Mat> G;     // d X_{m+1} / d (increment m), n x d per cell
  Scheme scheme = Scheme::euler;
  std::uint64_t seed = 0;

  bool has_variation() const noexcept { return !J.empty(); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(X.rows()); }
  Vec state(std::size_t k) const { return X.col(static_cast<Eigen::Index>(k)); }
};

/// Solves X_t = x + int V0(X) ds + sum_i int V_i(X) dB^i on the driver's grid.
/// `path` holds the driver values (d x nodes).
SdeSolution solve(const VectorFieldSystem& sys, const Vec& x0, const TimeGrid& grid,
                  const Mat& path, Scheme scheme = Scheme::euler, bool variation = false);

SdeSolution solve(const VectorFieldSystem& sys, const Vec& x0, const fbm::FbmPath& driver,
                  Scheme scheme = Scheme::euler);

/// As solve, plus J (exact derivative of the discrete flow, J_0 = I) and J^{-1}.
/// J^{-1} follows J^{-1}_{k+1} = J^{-1}_k E_k^{-1}, an implicit step of
/// dJ^{-1} = -J^{-1} DV(X) dB, so J J^{-1} = I holds to roundoff.
SdeSolution solve_variation(const VectorFieldSystem& sys, const Vec& x0,
                            const fbm::FbmPath& driver, Scheme scheme = Scheme::euler);

struct FlowCheck {
  Mat jacobian;     // J at the final node
  Mat finite_diff;  // central differences of the solution map
  double max_rel_error = 0.0;
  double eps = 0.0;
};

/// Compares J(T) with central differences of x0 -> X_T on the same driver.
/// eps <= 0 selects 1e-5 * max(1, |x0|).
FlowCheck flow_derivative_check(const VectorFieldSystem& sys, const Vec& x0,
                                const fbm::FbmPath& driver, double eps = 0.0,
                                Scheme scheme = Scheme::euler);

/// max_k || J_k Jinv_k - I ||_F.
double inverse_defect(const SdeSolution& sol);

struct MomentReport {
  std::vector<double> powers{1, 2, 4, 8};
  std::vector<double> moments;       // full sample
  std::vector<double> half_moments;  // first half of the replicas
  std::vector<double> quantile_levels{0.5, 0.9, 0.99};
  std::vector<double> quantiles;
  std::vector<double> half_quantiles;
  std::size_t n_paths = 0;
  double gamma = 0.0;
  std::size_t blowups = 0;
};

/// Monte Carlo moments of the Holder-gamma seminorm of X.
MomentReport apriori_moments(const VectorFieldSystem& sys, const Vec& x0, Hurst h,
                             std::size_t n_paths, double gamma, std::size_t n_steps,
                             std::uint64_t seed, Exec exec = default_exec());

}  // namespace hypofrac::sde
