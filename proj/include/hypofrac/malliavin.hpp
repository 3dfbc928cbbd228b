#pragma once

#include <cstdint>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/parallel.hpp"
#include "hypofrac/sde.hpp"

namespace hypofrac::malliavin {

using sde::SdeSolution;
using sde::VectorFieldSystem;

/// Derivative of X_T with respect to the driver increment on cell m in
/// direction j, divided out to a density: J_T J_{m+1}^{-1} G_m e_j. This is
/// the exact Gateaux derivative of the discrete solution map, so perturbing B
/// by eps on [t_{m+1}, T] moves X_T by eps times this vector to O(eps^2).
Vec malliavin_derivative(const SdeSolution& sol, std::size_t cell, std::size_t j);

/// Continuous formula J_T J_s^{-1} V_j(X_s) at node s. Differs from the cell
/// form by O(mesh^H).
Vec malliavin_derivative_node(const SdeSolution& sol, const VectorFieldSystem& sys,
                              std::size_t node, std::size_t j);

/// Cell values of s -> D_s^j X_T, as an n x (steps + 1) path whose last
/// column repeats the final cell (it does not enter inner products).
Mat derivative_path(const SdeSolution& sol, std::size_t j);

/// Pulled-back fields J_{m+1}^{-1} G_m e_j per cell, n x steps.
Mat pulled_back_path(const SdeSolution& sol, std::size_t j);

/// C1 = sum_{u,v} mass(|u-v|) / (H(2H-1)) M_u M_v^T with M_u = J_{u+1}^{-1} G_u.
Mat c1_matrix(const SdeSolution& sol, Hurst h, Exec exec = default_exec());

/// Gamma_1 = H(2H-1) J_T C1 J_T^T.
Mat gamma_matrix(const SdeSolution& sol, Hurst h, Exec exec = default_exec());

struct MalliavinReport {
  Mat gamma;
  Mat c1;
  Vec gamma_eigenvalues;  // ascending
  Vec c1_eigenvalues;
  double gamma_det = 0.0;
  double c1_det = 0.0;
};

MalliavinReport malliavin_report(const SdeSolution& sol, Hurst h, Exec exec = default_exec());

/// Canonical basis followed by `n_random` seeded uniform unit vectors.
std::vector<Vec> probe_directions(std::size_t n, std::size_t n_random, std::uint64_t seed);

struct ProbeRow {
  std::size_t direction = 0;
  double eps = 0.0;
  std::size_t hits = 0;
  double probability = 0.0;
};

struct ProbeReport {
  std::vector<Vec> directions;
  std::vector<double> eps_grid;
  std::vector<ProbeRow> rows;
  std::vector<double> decay_exponents;  // per direction, slope of log P vs log eps (NaN if < 2 points)
  double sup_probability_min_eps = 0.0; // max over directions at the smallest eps
  std::vector<double> inverse_det_moments;       // p = 1, 2
  std::vector<double> inverse_det_moments_half;  // first half of the replicas
  std::vector<double> min_eigenvalues;           // per path
  std::size_t nonpositive_min_eigenvalues = 0;
  std::size_t n_paths = 0;
  std::size_t blowups = 0;
};

ProbeReport eigen_probe(const VectorFieldSystem& sys, const Vec& x0, Hurst h,
                        const std::vector<Vec>& directions, const std::vector<double>& eps_grid,
                        std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                        Exec exec = default_exec());

}  // namespace hypofrac::malliavin
