#include <gtest/gtest.h>

#include <cmath>

#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "hypofrac/malliavin.hpp"

using namespace hypofrac;
using namespace hypofrac::malliavin;

namespace {

fbm::FbmPath driver(std::size_t dim, std::size_t steps, std::uint64_t seed, double h = 0.7) {
  return fbm::CholeskySampler(Hurst(h), TimeGrid(steps)).sample_one(dim, 0, seed);
}

// Adds eps to increment m of component j, i.e. eps on [t_{m+1}, T].
fbm::FbmPath bumped(fbm::FbmPath b, std::size_t m, std::size_t j, double eps) {
  for (Eigen::Index k = static_cast<Eigen::Index>(m) + 1; k < b.values.cols(); ++k) {
    b.values(static_cast<Eigen::Index>(j), k) += eps;
  }
  return b;
}

double bump_error(const poly::VectorFieldSystem& sys, const Vec& x0, const fbm::FbmPath& b,
                  std::size_t m, std::size_t j) {
  const double eps = 1e-6;
  const auto sol = sde::solve_variation(sys, x0, b);
  const Vec up = sde::solve(sys, x0, bumped(b, m, j, eps)).X.rightCols(1);
  const Vec dn = sde::solve(sys, x0, bumped(b, m, j, -eps)).X.rightCols(1);
  const Vec fd = (up - dn) / (2 * eps);
  const Vec d = malliavin_derivative(sol, m, j);
  return (fd - d).norm() / std::max(1.0, d.norm());
}

}  // namespace

TEST(Derivative, ConstantFieldsGiveUnitVectors) {
  const auto sys = poly::systems::elliptic(2);
  const auto sol = sde::solve_variation(sys, Vec::Zero(2), driver(2, 64, 1));
  for (std::size_t m : {0u, 17u, 63u}) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_LT((malliavin_derivative(sol, m, j) - Vec::Unit(2, j)).norm(), 1e-14);
    }
  }
}

TEST(Derivative, LinearEqualsSolutionOverStepFactor) {
  const auto b = driver(1, 256, 2);
  const auto sol = sde::solve_variation(poly::systems::scalar_linear(), Vec::Constant(1, 1.0), b);
  const double xT = sol.X(0, 256);
  for (std::size_t m : {0u, 100u, 255u}) {
    EXPECT_NEAR(malliavin_derivative(sol, m, 0)[0], xT / (1.0 + b.increment(0, m)), 1e-12 * std::abs(xT));
    // Continuous form D_s X_1 = X_1 up to the mesh.
    EXPECT_NEAR(malliavin_derivative(sol, m, 0)[0], xT, 0.05 * std::abs(xT));
  }
}

TEST(Derivative, MatchesBumpedDriver) {
  const auto b = driver(2, 512, 3);
  const auto heis = poly::systems::heisenberg();
  const auto quad = poly::systems::quadratic();
  for (std::size_t m : {0u, 200u, 511u}) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_LT(bump_error(heis, Vec::Zero(3), b, m, j), 1e-6);
      EXPECT_LT(bump_error(quad, Vec::Zero(2), b, m, j), 1e-6);
    }
  }
  const auto b1 = driver(1, 512, 4);
  EXPECT_LT(bump_error(poly::systems::scalar_linear(), Vec::Constant(1, 1.0), b1, 300, 0), 1e-6);
}

TEST(Derivative, NodeFormCloseToCellForm) {
  const auto b = driver(2, 1024, 5);
  const auto sys = poly::systems::heisenberg();
  const auto sol = sde::solve_variation(sys, Vec::Zero(3), b);
  for (std::size_t m : {10u, 500u}) {
    const Vec a = malliavin_derivative(sol, m, 1);
    const Vec c = malliavin_derivative_node(sol, sys, m, 1);
    EXPECT_LT((a - c).norm(), 0.05);
  }
  EXPECT_THROW(malliavin_derivative(sol, 1024, 0), DomainError);
  EXPECT_THROW(malliavin_derivative(sol, 0, 2), DomainError);
}

TEST(Gamma, ScalarAdditiveIsOne) {
  for (double h : {0.6, 0.75, 0.9}) {
    const auto sol = sde::solve_variation(poly::systems::scalar_additive(), Vec::Zero(1), driver(1, 128, 6, h));
    EXPECT_NEAR(gamma_matrix(sol, Hurst(h))(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(c1_matrix(sol, Hurst(h))(0, 0), 1.0 / (h * (2 * h - 1)), 1e-10);
  }
}

TEST(Gamma, ConstantFieldsGiveVVt) {
  poly::VectorFieldSystem sys;
  sys.n = 2;
  sys.d = 2;
  sys.fields.push_back({poly::Polynomial::constant(2, 1.0), poly::Polynomial::constant(2, 2.0)});
  sys.fields.push_back({poly::Polynomial::constant(2, -0.5), poly::Polynomial::constant(2, 3.0)});
  Mat v(2, 2);
  v << 1, -0.5, 2, 3;
  const auto sol = sde::solve_variation(sys, Vec::Zero(2), driver(2, 64, 7));
  const Hurst h(0.7);
  EXPECT_LT((gamma_matrix(sol, h) - v * v.transpose()).norm(), 1e-12);
  EXPECT_LT((c1_matrix(sol, h) - v * v.transpose() / (0.7 * 0.4)).norm(), 1e-10);
}

TEST(Gamma, RankDeficientIsSingular) {
  const auto sol = sde::solve_variation(poly::systems::rank_deficient(), Vec::Zero(2), driver(2, 64, 8));
  const auto rep = malliavin_report(sol, Hurst(0.7));
  EXPECT_NEAR(rep.gamma_det, 0.0, 1e-14);
  EXPECT_NEAR(rep.gamma_eigenvalues[0], 0.0, 1e-14);
  EXPECT_NEAR(rep.gamma_eigenvalues[1], 1.0, 1e-12);
}

TEST(Gamma, FactorisationThroughC1) {
  const Hurst h(0.65);
  const auto sol = sde::solve_variation(poly::systems::quadratic(), Vec::Zero(2), driver(2, 256, 9, 0.65));
  const Mat c1 = c1_matrix(sol, h);
  const Mat& j = sol.J.back();
  const Mat g = gamma_matrix(sol, h);
  EXPECT_LT((g - 0.65 * 0.3 * j * c1 * j.transpose()).norm(), 1e-8 * g.norm());
  EXPECT_LT((c1 - c1.transpose()).norm(), 1e-14 * c1.norm());
}

TEST(Gamma, GramOfDerivativePaths) {
  const Hurst h(0.7);
  const auto b = driver(2, 256, 10);
  for (const auto& sys : {poly::systems::heisenberg(), poly::systems::quadratic()}) {
    const auto sol = sde::solve_variation(sys, Vec::Zero(sys.n), b);
    const Mat g = gamma_matrix(sol, h);
    Mat gram = Mat::Zero(sys.n, sys.n);
    for (std::size_t j = 0; j < sys.d; ++j) {
      const Mat dp = derivative_path(sol, j);
      for (std::size_t a = 0; a < sys.n; ++a) {
        for (std::size_t c = 0; c < sys.n; ++c) {
          const holder::SampledPath pa(sol.grid, dp.row(a));
          const holder::SampledPath pc(sol.grid, dp.row(c));
          gram(a, c) += frac::h_inner_kernel(pa, pc, h);
        }
      }
    }
    EXPECT_LT((gram - g).norm(), 1e-8 * g.norm());
  }
}

TEST(Gamma, SerialMatchesParallel) {
  const auto sol = sde::solve_variation(poly::systems::heisenberg(), Vec::Zero(3), driver(2, 300, 11));
  const Mat a = c1_matrix(sol, Hurst(0.7), Exec::serial);
  const Mat b = c1_matrix(sol, Hurst(0.7), Exec::parallel);
  EXPECT_EQ(a, b);
}

TEST(Probe, Directions) {
  const auto dirs = probe_directions(3, 5, 1);
  ASSERT_EQ(dirs.size(), 8u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(dirs[i], Vec::Unit(3, i));
  for (const auto& v : dirs) EXPECT_NEAR(v.norm(), 1.0, 1e-15);
  EXPECT_EQ(probe_directions(3, 5, 1), dirs);
  EXPECT_NE(probe_directions(3, 5, 2)[4], dirs[4]);
}

TEST(Probe, EllipticNeverSmall) {
  const auto sys = poly::systems::elliptic(2);
  const auto rep = eigen_probe(sys, Vec::Zero(2), Hurst(0.7), probe_directions(2, 4, 1),
                               {1e-1, 1e-2, 1e-3}, 100, 64, 1);
  EXPECT_EQ(rep.sup_probability_min_eps, 0.0);
  for (const auto& row : rep.rows) EXPECT_EQ(row.hits, 0u);
  EXPECT_EQ(rep.nonpositive_min_eigenvalues, 0u);
}

TEST(Probe, RankDeficientAlwaysSmall) {
  const auto sys = poly::systems::rank_deficient();
  const auto rep = eigen_probe(sys, Vec::Zero(2), Hurst(0.7), probe_directions(2, 0, 1),
                               {1e-1, 1e-3}, 50, 32, 1);
  for (const auto& row : rep.rows) {
    if (row.direction == 1) EXPECT_EQ(row.probability, 1.0);
    if (row.direction == 0) EXPECT_EQ(row.probability, 0.0);
  }
  EXPECT_EQ(rep.sup_probability_min_eps, 1.0);
}

TEST(Probe, HeisenbergDecays) {
  const auto sys = poly::systems::heisenberg();
  const std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3};
  const auto rep = eigen_probe(sys, Vec::Zero(3), Hurst(0.7), probe_directions(3, 2, 1), eps, 400, 64, 2);
  for (std::size_t k = 0; k < rep.directions.size(); ++k) {
    double prev = 2.0;
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const double p = rep.rows[k * eps.size() + e].probability;
      EXPECT_LE(p, prev);
      prev = p;
    }
  }
  EXPECT_LT(rep.sup_probability_min_eps, 0.1);
  EXPECT_EQ(rep.blowups, 0u);
  EXPECT_EQ(rep.inverse_det_moments.size(), 2u);
}

TEST(Probe, Validation) {
  const auto sys = poly::systems::elliptic(2);
  EXPECT_THROW(eigen_probe(sys, Vec::Zero(2), Hurst(0.7), {Vec::Ones(2)}, {0.1}, 1, 8, 1), DomainError);
  EXPECT_THROW(eigen_probe(sys, Vec::Zero(2), Hurst(0.7), probe_directions(2, 0, 1), {0.01, 0.1}, 1, 8, 1),
               DomainError);
}

TEST(Probe, ThreadIndependent) {
  const auto sys = poly::systems::heisenberg();
  const auto dirs = probe_directions(3, 2, 1);
  const auto a = eigen_probe(sys, Vec::Zero(3), Hurst(0.7), dirs, {0.1, 0.01}, 40, 32, 3, Exec::serial);
  const auto b = eigen_probe(sys, Vec::Zero(3), Hurst(0.7), dirs, {0.1, 0.01}, 40, 32, 3, Exec::parallel);
  EXPECT_EQ(a.min_eigenvalues, b.min_eigenvalues);
  EXPECT_EQ(a.inverse_det_moments, b.inverse_det_moments);
}
