#include "hypofrac/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "hypofrac/kernels.hpp"
#include "hypofrac/rng.hpp"

namespace hypofrac::malliavin {

namespace {

void require_variation(const SdeSolution& sol) {
  if (!sol.has_variation()) throw DomainError("malliavin: solution carries no variation data");
}

}  // namespace

Vec malliavin_derivative(const SdeSolution& sol, std::size_t cell, std::size_t j) {
  require_variation(sol);
  if (cell >= sol.G.size()) throw DomainError("malliavin_derivative: cell lies past the horizon");
  const Mat& g = sol.G[cell];
  if (j >= static_cast<std::size_t>(g.cols())) throw DomainError("malliavin_derivative: bad noise index");
  return sol.J.back() * (sol.Jinv[cell + 1] * g.col(static_cast<Eigen::Index>(j)));
}

Vec malliavin_derivative_node(const SdeSolution& sol, const VectorFieldSystem& sys,
                              std::size_t node, std::size_t j) {
  require_variation(sol);
  if (node >= sol.J.size()) throw DomainError("malliavin_derivative: s lies past t");
  if (j >= sys.d) throw DomainError("malliavin_derivative: bad noise index");
  return sol.J.back() * (sol.Jinv[node] * poly::eval(sys.fields[j], sol.state(node)));
}

Mat pulled_back_path(const SdeSolution& sol, std::size_t j) {
  require_variation(sol);
  const auto n = static_cast<Eigen::Index>(sol.n());
  Mat out(n, static_cast<Eigen::Index>(sol.G.size()));
  for (std::size_t m = 0; m < sol.G.size(); ++m) {
    out.col(static_cast<Eigen::Index>(m)) = sol.Jinv[m + 1] * sol.G[m].col(static_cast<Eigen::Index>(j));
  }
  return out;
}

Mat derivative_path(const SdeSolution& sol, std::size_t j) {
  const Mat m = pulled_back_path(sol, j);
  Mat out(m.rows(), m.cols() + 1);
  out.leftCols(m.cols()) = sol.J.back() * m;
  out.col(m.cols()) = out.col(m.cols() - 1);
  return out;
}

Mat c1_matrix(const SdeSolution& sol, Hurst h, Exec exec) {
  require_variation(sol);
  const auto n = static_cast<Eigen::Index>(sol.n());
  const std::size_t cells = sol.G.size();
  const auto d = sol.G.front().cols();
  auto w = frac::cell_masses(h, cells, sol.grid.mesh());
  const double norm = h.value() * (2.0 * h.value() - 1.0);
  for (auto& x : w) x /= norm;
  // Stack the n x d blocks M_u column-major into one column per cell.
  Mat stacked(n * d, static_cast<Eigen::Index>(cells));
  for (std::size_t u = 0; u < cells; ++u) {
    const Mat mu = sol.Jinv[u + 1] * sol.G[u];
    stacked.col(static_cast<Eigen::Index>(u)) = Eigen::Map<const Vec>(mu.data(), n * d);
  }
  const Mat smoothed = kernels::toeplitz_apply(w, stacked, exec);
  Mat c1 = Mat::Zero(n, n);
  for (std::size_t u = 0; u < cells; ++u) {
    const auto col = static_cast<Eigen::Index>(u);
    Eigen::Map<const Mat> mu(stacked.col(col).data(), n, d);
    Eigen::Map<const Mat> su(smoothed.col(col).data(), n, d);
    c1.noalias() += mu * su.transpose();
  }
  return 0.5 * (c1 + c1.transpose());
}

Mat gamma_matrix(const SdeSolution& sol, Hurst h, Exec exec) {
  const Mat c1 = c1_matrix(sol, h, exec);
  const Mat& j = sol.J.back();
  const Mat g = h.value() * (2.0 * h.value() - 1.0) * (j * c1 * j.transpose());
  return 0.5 * (g + g.transpose());
}

MalliavinReport malliavin_report(const SdeSolution& sol, Hurst h, Exec exec) {
  MalliavinReport rep;
  rep.c1 = c1_matrix(sol, h, exec);
  const Mat& j = sol.J.back();
  rep.gamma = h.value() * (2.0 * h.value() - 1.0) * (j * rep.c1 * j.transpose());
  rep.gamma = 0.5 * (rep.gamma + rep.gamma.transpose()).eval();
  rep.gamma_eigenvalues = Eigen::SelfAdjointEigenSolver<Mat>(rep.gamma).eigenvalues();
  rep.c1_eigenvalues = Eigen::SelfAdjointEigenSolver<Mat>(rep.c1).eigenvalues();
  rep.gamma_det = rep.gamma.determinant();
  rep.c1_det = rep.c1.determinant();
  return rep;
}

std::vector<Vec> probe_directions(std::size_t n, std::size_t n_random, std::uint64_t seed) {
  std::vector<Vec> out;
  const auto dim = static_cast<Eigen::Index>(n);
  for (Eigen::Index i = 0; i < dim; ++i) out.push_back(Vec::Unit(dim, i));
  for (std::size_t r = 0; r < n_random; ++r) {
    rng::Stream stream(seed, "probe-direction", r);
    Vec v(dim);
    do {
      for (Eigen::Index i = 0; i < dim; ++i) v[i] = stream.gaussian();
    } while (v.norm() == 0.0);
    out.push_back(v / v.norm());
  }
  return out;
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ProbeReport eigen_probe(const VectorFieldSystem& sys, const Vec& x0, Hurst h,
                        const std::vector<Vec>& directions, const std::vector<double>& eps_grid,
                        std::size_t n_paths, std::size_t n_steps, std::uint64_t seed, Exec exec) {
  for (const auto& v : directions) {
    if (static_cast<std::size_t>(v.size()) != sys.n || std::abs(v.norm() - 1.0) > 1e-9) {
      throw DomainError("eigen_probe: directions must be unit vectors in R^n");
    }
  }
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0) || (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))) {
      throw DomainError("eigen_probe: eps grid must be positive and decreasing");
    }
  }
  ProbeReport rep;
  rep.directions = directions;
  rep.eps_grid = eps_grid;
  rep.n_paths = n_paths;
  const TimeGrid grid(n_steps);
  const fbm::CholeskySampler sampler(h, grid);
  const std::size_t nd = directions.size();
  std::vector<std::vector<double>> forms(n_paths, std::vector<double>(nd, 0.0));
  std::vector<double> dets(n_paths, 0.0), mins(n_paths, 0.0);
  std::vector<char> failed(n_paths, 0);
  for_each_index(exec, n_paths, [&](std::size_t p) {
    const auto driver = sampler.sample_one(sys.d, p, seed);
    try {
      const auto sol = sde::solve_variation(sys, x0, driver);
      const Mat c1 = c1_matrix(sol, h, Exec::serial);
      for (std::size_t k = 0; k < nd; ++k) forms[p][k] = directions[k].dot(c1 * directions[k]);
      dets[p] = c1.determinant();
      mins[p] = Eigen::SelfAdjointEigenSolver<Mat>(c1).eigenvalues()[0];
    } catch (const NumericalError&) {
      failed[p] = 1;
    }
  });
  std::size_t ok = 0, ok_half = 0;
  std::vector<double> inv(2, 0.0), inv_half(2, 0.0);
  for (std::size_t p = 0; p < n_paths; ++p) {
    if (failed[p]) {
      ++rep.blowups;
      continue;
    }
    ++ok;
    rep.min_eigenvalues.push_back(mins[p]);
    if (!(mins[p] > 0.0)) ++rep.nonpositive_min_eigenvalues;
    const double ad = std::abs(dets[p]);
    for (int q = 0; q < 2; ++q) {
      const double term = std::pow(ad, -(q + 1.0));
      inv[static_cast<std::size_t>(q)] += term;
      if (p < n_paths / 2) inv_half[static_cast<std::size_t>(q)] += term;
    }
    if (p < n_paths / 2) ++ok_half;
  }
  for (int q = 0; q < 2; ++q) {
    rep.inverse_det_moments.push_back(ok ? inv[static_cast<std::size_t>(q)] / static_cast<double>(ok) : 0.0);
    rep.inverse_det_moments_half.push_back(
        ok_half ? inv_half[static_cast<std::size_t>(q)] / static_cast<double>(ok_half) : 0.0);
  }
  for (std::size_t k = 0; k < nd; ++k) {
    std::vector<double> probs;
    for (double eps : eps_grid) {
      ProbeRow row{k, eps, 0, 0.0};
      for (std::size_t p = 0; p < n_paths; ++p) {
        if (!failed[p] && forms[p][k] <= eps) ++row.hits;
      }
      row.probability = ok ? static_cast<double>(row.hits) / static_cast<double>(ok) : 0.0;
      probs.push_back(row.probability);
      rep.rows.push_back(row);
    }
    rep.decay_exponents.push_back(loglog_slope(eps_grid, probs));
    if (!probs.empty()) rep.sup_probability_min_eps = std::max(rep.sup_probability_min_eps, probs.back());
  }
  return rep;
}

}  // namespace hypofrac::malliavin
