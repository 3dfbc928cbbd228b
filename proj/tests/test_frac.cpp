#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "support.hpp"

using namespace hypofrac;
using namespace hypofrac::frac;

namespace {

SampledPath fn(std::size_t n, const std::function<double(double)>& f) { return SampledPath::from_function(TimeGrid(n), f); }

double l2(const SampledPath& a, const SampledPath& b) {
  const double m = a.grid.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < a.nodes(); ++k) {
    const double w = (k == 0 || k + 1 == a.nodes()) ? 0.5 : 1.0;
    s += w * a(k) * b(k);
  }
  return s * m;
}

double bump(double t, double a, double b) {
  if (t <= a || t >= b) return 0.0;
  const double u = (t - a) / (b - a);
  return std::exp(-1.0 / (u * (1 - u)));
}

double sup_err_from(const SampledPath& p, double value, double t0) {
  double e = 0.0;
  for (std::size_t k = 0; k < p.nodes(); ++k)
    if (p.grid.node(k) >= t0) e = std::max(e, std::abs(p(k) - value));
  return e;
}

}  // namespace

TEST(FracIntegral, PowerRule) {
  const auto one = fn(512, [](double) { return 1.0; });
  const auto I = frac_integral(one, 0.25);
  EXPECT_NEAR(I(512), 1.0 / std::tgamma(1.25), 1e-12);
  EXPECT_NEAR(I(128), std::pow(0.25, 0.25) / std::tgamma(1.25), 1e-12);
  EXPECT_EQ(sup_norm(frac_integral(fn(64, [](double) { return 0.0; }), 0.4)), 0.0);
  EXPECT_THROW(frac_integral(one, 1.0), DomainError);
  EXPECT_THROW(frac_integral(one, 0.0), DomainError);
}

TEST(FracIntegral, BetaIntegralOracle) {
  boost::math::quadrature::tanh_sinh<double> q;
  const double oracle = q.integrate(
      [](double s, double sc) { return std::pow(sc > 0 ? sc : 1 - s, -0.5) * s; }, 0.0, 1.0) / std::tgamma(0.5);
  EXPECT_NEAR(oracle, 1.0 / std::tgamma(2.5), 1e-12);
  const auto I = frac_integral(fn(1024, [](double t) { return t; }), 0.5);
  EXPECT_NEAR(I(1024), oracle, 1e-3);
}

TEST(FracIntegral, SerialMatchesParallel) {
  const auto p = fn(700, [](double t) { return std::sin(5 * t); });
  EXPECT_EQ(frac_integral(p, 0.3, Exec::serial).values, frac_integral(p, 0.3, Exec::parallel).values);
}

TEST(FracDerivative, InvertsIntegralUnderRefinement) {
  std::vector<double> lm, le;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const auto I = frac_integral(fn(n, [](double) { return 1.0; }), 0.3);
    const auto D = frac_derivative(I, 0.3);
    lm.push_back(std::log(1.0 / n));
    le.push_back(std::log(sup_err_from(D, 1.0, 0.1)));
  }
  EXPECT_LT(le.back(), le.front());
  EXPECT_GE(testing_support::slope(lm, le), 0.5);
}

TEST(FracDerivative, PowerFunction) {
  const double a = 0.4;
  const auto f = fn(4096, [&](double t) { return std::pow(t, a); });
  std::vector<std::string> warnings;
  const auto D = frac_derivative(f, a, &warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_LT(sup_err_from(D, std::tgamma(1 + a), 0.1), 5e-3);
  EXPECT_EQ(sup_norm(frac_derivative(fn(32, [](double) { return 0.0; }), a)), 0.0);
  frac_derivative(fn(32, [](double) { return 1.0; }), a, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(FracDerivativeMinus, AdjointIdentity) {
  const double a = 0.3;
  const std::size_t n = 2048;
  const auto g = fn(n, [](double t) { return bump(t, 0.1, 0.7); });
  const auto h = fn(n, [](double t) { return bump(t, 0.3, 0.9); });
  const double lhs = l2(frac_derivative(g, a), h);
  const double rhs = l2(g, frac_derivative_minus(h, a));
  EXPECT_NEAR(lhs, rhs, 1e-2 * std::abs(lhs));
  EXPECT_EQ(sup_norm(frac_derivative_minus(fn(32, [](double) { return 0.0; }), a)), 0.0);
}

TEST(FracDerivativeMinus, StableNormForHolderInput) {
  const double a = 0.3;
  auto f = [](double t) { return std::pow(1 - t, 0.6) * std::cos(2 * t); };
  const auto d1 = frac_derivative_minus(fn(512, f), a);
  const auto d2 = frac_derivative_minus(fn(2048, f), a);
  const double n1 = std::sqrt(l2(d1, d1)), n2 = std::sqrt(l2(d2, d2));
  EXPECT_TRUE(std::isfinite(n2));
  EXPECT_NEAR(n1, n2, 0.03 * n2);
}

TEST(CellMasses, TelescopeToUnitSquare) {
  const auto w = cell_masses(Hurst(0.7), 64, 1.0 / 64);
  double total = 0.0;
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t k = 0; k < 64; ++k) total += w[j > k ? j - k : k - j];
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(HInnerKernel, IndicatorsGiveCovariance) {
  const std::size_t n = 200;
  const Hurst h(0.65);
  EXPECT_NEAR(h_inner_kernel(fn(n, [](double) { return 1.0; }), fn(n, [](double) { return 1.0; }), h), 1.0, 1e-12);
  for (auto [t, s] : {std::pair{0.3, 0.8}, std::pair{0.5, 0.5}, std::pair{1.0, 0.15}}) {
    const auto phi = fn(n, [t = t](double u) { return u < t - 1e-12 ? 1.0 : 0.0; });
    const auto psi = fn(n, [s = s](double u) { return u < s - 1e-12 ? 1.0 : 0.0; });
    EXPECT_NEAR(h_inner_kernel(phi, psi, h), fbm::covariance(0.65, t, s), 1e-12);
  }
  Mat a = Mat::Zero(2, n + 1), b = Mat::Zero(2, n + 1);
  a.row(0).setRandom();
  b.row(1).setRandom();
  EXPECT_EQ(h_inner_kernel(SampledPath(TimeGrid(n), a), SampledPath(TimeGrid(n), b), h), 0.0);
}

TEST(HInnerFrac, AgreesWithKernelOnIndicators) {
  const std::size_t n = 1024;
  const Hurst h(0.7);
  for (auto [t, s] : {std::pair{1.0, 1.0}, std::pair{0.25, 0.75}, std::pair{0.5, 0.5}}) {
    const auto phi = fn(n, [t = t](double u) { return u < t - 1e-12 ? 1.0 : 0.0; });
    const auto psi = fn(n, [s = s](double u) { return u < s - 1e-12 ? 1.0 : 0.0; });
    const double k = h_inner_kernel(phi, psi, h);
    EXPECT_NEAR(h_inner_frac(phi, psi, h), k, 0.01 * k) << t << " " << s;
  }
}

TEST(HInnerFrac, ZeroSymmetryAndTail) {
  const Hurst h(0.75);
  const auto phi = fn(256, [](double t) { return std::sin(4 * t) + t; });
  const auto psi = fn(256, [](double t) { return t < 0.4 ? 1.0 : -0.5; });
  EXPECT_EQ(h_inner_frac(fn(256, [](double) { return 0.0; }), psi, h), 0.0);
  EXPECT_EQ(h_inner_frac(phi, psi, h), h_inner_frac(psi, phi, h));
  const auto rep = h_inner_frac_report(phi, psi, h, 8.0);
  EXPECT_DOUBLE_EQ(rep.horizon, 8.0);
  EXPECT_LT(rep.remainder, 1e-6 * std::abs(rep.value) + 1e-12);
  EXPECT_THROW(h_inner_frac_report(phi, psi, h, 1.5), DomainError);
  EXPECT_EQ(h_inner_frac(phi, psi, h, 8.0, Exec::serial), h_inner_frac(phi, psi, h, 8.0, Exec::parallel));
}

TEST(HInner, CorpusEquivalenceAndGramPsd) {
  const auto rep = check_reprh(Hurst(0.7), 1024, 8, 3);
  EXPECT_LE(rep.max_rel_error, 0.01);
  const auto corpus = pair_corpus(256, 4, 5);
  std::vector<SampledPath> elems;
  for (const auto& [a, b] : corpus) elems.push_back(a), elems.push_back(b);
  Mat gk(elems.size(), elems.size()), gf(elems.size(), elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j) {
      gk(i, j) = h_inner_kernel(elems[i], elems[j], Hurst(0.7));
      gf(i, j) = h_inner_frac(elems[i], elems[j], Hurst(0.7));
    }
  for (const Mat& g : {gk, gf}) {
    EXPECT_LT((g - g.transpose()).norm(), 1e-12 * g.norm());
    const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (g + g.transpose())).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-10 * ev.maxCoeff());
  }
}

TEST(NormBound, DegenerateCases) {
  const Hurst h(0.7);
  const auto z = h_norm_lower_bound(fn(64, [](double) { return 0.0; }), h, 0.3);
  EXPECT_TRUE(z.zero_path);
  const auto c = h_norm_lower_bound(fn(64, [](double) { return 1.0; }), h, 0.3);
  EXPECT_FALSE(c.zero_path);
  EXPECT_TRUE(std::isfinite(c.ratio));
  EXPECT_DOUBLE_EQ(c.gamma_norm, 1.0);
  EXPECT_NE(c.convention.find("seminorm + sup"), std::string::npos);
  EXPECT_THROW(h_norm_lower_bound(fn(64, [](double) { return 1.0; }), h, 0.1), DomainError);
}

TEST(NormBound, RatioBoundedBelowOnFbmFamily) {
  const auto paths = fbm::sample_cholesky(Hurst(0.7), TimeGrid(128), 1, 200, 17);
  double lo = INFINITY;
  for (const auto& p : paths) lo = std::min(lo, h_norm_lower_bound(SampledPath::from_fbm(p), Hurst(0.7), 0.3).ratio);
  EXPECT_GT(lo, 0.0);
  EXPECT_TRUE(std::isfinite(lo));
}
