// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "hypofrac/hormander.hpp"
#include "hypofrac/io.hpp"
#include "hypofrac/malliavin.hpp"
#include "hypofrac/norris.hpp"
#include "hypofrac/rng.hpp"
#include "hypofrac/sde.hpp"
#include "hypofrac/smalltime.hpp"

using namespace hypofrac;
using hypofrac::io::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

// ---- 1: covariance of exact samples ----
Outcome fbm_covariance() {
  const std::size_t steps = 256, n_paths = 10000;
  double worst = 0.0;
  for (double h : {0.6, 0.75, 0.9}) {
    const TimeGrid grid(steps);
    const auto paths = fbm::sample_cholesky(Hurst(h), grid, 1, n_paths, 101);
    rng::Stream pick(7, "acceptance-pairs", static_cast<std::uint64_t>(h * 100));
    std::uniform_int_distribution<std::size_t> node(1, steps);
    for (int q = 0; q < 20; ++q) {
      const std::size_t a = node(pick.engine()), b = node(pick.engine());
      double m = 0.0, m2 = 0.0;
      for (const auto& p : paths) {
        const double v = p.values(0, static_cast<Eigen::Index>(a)) * p.values(0, static_cast<Eigen::Index>(b));
        m += v;
        m2 += v * v;
      }
      m /= n_paths;
      const double se = std::sqrt((m2 / n_paths - m * m) / n_paths);
      const double z = std::abs(m - fbm::covariance(h, grid.node(a), grid.node(b))) / se;
      worst = std::max(worst, z);
    }
  }
  return {worst <= 5.0, "max |z| = " + fmt(worst) + " over 60 pairs"};
}

// ---- 2: kernel form vs fractional form ----
Outcome representation() {
  const auto rep = frac::check_reprh(Hurst(0.7), 1024, 50, 1);
  return {rep.max_rel_error <= 0.01, "max relative error " + fmt(rep.max_rel_error) + " on 50 pairs"};
}

// ---- 3: Malliavin derivative vs Gateaux derivative ----
fbm::FbmPath bumped(fbm::FbmPath b, std::size_t m, std::size_t j, double eps) {
  for (Eigen::Index k = static_cast<Eigen::Index>(m) + 1; k < b.values.cols(); ++k) {
    b.values(static_cast<Eigen::Index>(j), k) += eps;
  }
  return b;
}

Outcome bump_test() {
  const std::size_t steps = 2048;
  double worst = 0.0;
  for (const auto& [sys, x0] : {std::pair{poly::systems::scalar_linear(), Vec(Vec::Constant(1, 1.0))},
                                std::pair{poly::systems::heisenberg(), Vec(Vec::Zero(3))}}) {
    const auto b = fbm::CholeskySampler(Hurst(0.7), TimeGrid(steps)).sample_one(sys.d, 0, 303);
    const auto sol = sde::solve_variation(sys, x0, b);
    rng::Stream pick(3, "acceptance-bump", sys.n);
    std::uniform_int_distribution<std::size_t> cell(0, steps - 1), dir(0, sys.d - 1);
    for (int q = 0; q < 20; ++q) {
      const std::size_t m = cell(pick.engine()), j = dir(pick.engine());
      const double eps = 1e-6;
      const Vec up = sde::solve(sys, x0, bumped(b, m, j, eps)).X.rightCols(1);
      const Vec dn = sde::solve(sys, x0, bumped(b, m, j, -eps)).X.rightCols(1);
      const Vec d = malliavin::malliavin_derivative(sol, m, j);
      worst = std::max(worst, ((up - dn) / (2 * eps) - d).norm() / std::max(d.norm(), 1e-12));
    }
  }
  return {worst <= 1e-3, "max relative error " + fmt(worst) + " over 40 (s, j)"};
}

// ---- 4: Gram identity and factorisation ----
Outcome gram_identity() {
  const Hurst h(0.7);
  double gram_err = 0.0, fact_err = 0.0;
  for (const auto& sys : {poly::systems::heisenberg(), poly::systems::quadratic(), poly::systems::grushin()}) {
    for (std::size_t p = 0; p < 5; ++p) {
      const auto b = fbm::CholeskySampler(h, TimeGrid(256)).sample_one(sys.d, p, 404);
      const auto sol = sde::solve_variation(sys, Vec::Zero(sys.n), b);
      const Mat g = malliavin::gamma_matrix(sol, h);
      Mat gram = Mat::Zero(sys.n, sys.n);
      for (std::size_t j = 0; j < sys.d; ++j) {
        const Mat dp = malliavin::derivative_path(sol, j);
        for (std::size_t a = 0; a < sys.n; ++a) {
          for (std::size_t c = 0; c < sys.n; ++c) {
            gram(a, c) += frac::h_inner_kernel(holder::SampledPath(sol.grid, dp.row(a)),
                                               holder::SampledPath(sol.grid, dp.row(c)), h);
          }
        }
      }
      gram_err = std::max(gram_err, (gram - g).norm() / g.norm());
      const Mat& jt = sol.J.back();
      const Mat f = 0.7 * 0.4 * jt * malliavin::c1_matrix(sol, h) * jt.transpose();
      fact_err = std::max(fact_err, (f - g).norm() / g.norm());
    }
  }
  return {gram_err <= 0.01 && fact_err <= 1e-8,
          "Gram relative error " + fmt(gram_err) + ", factorisation relative error " + fmt(fact_err)};
}

// ---- 5: concentration scaling and HS slope ----
Outcome concentration() {
  const auto rep = norris::concentration_scaling(Hurst(0.75), norris::CoarseQvConfig{1.0 / 128, 1.0 / 16}, 10000, 505);
  const auto hs = norris::hs_bound_check(Hurst(0.75));
  return {rep.pass && hs.pass, "rate ratio " + fmt(rep.observed_ratio) + " vs predicted " +
                                   fmt(rep.predicted_ratio) + " (rel. error " + fmt(rep.relative_error) +
                                   "), HS slope " + fmt(hs.slope) + " vs " + fmt(hs.predicted)};
}

// ---- 6: Norris sweep ----
Outcome sweep() {
  norris::SweepConfig cfg;
  cfg.eps_grid = {1e-1, 1e-2, 1e-3};
  cfg.n_paths = 10000;
  cfg.n_steps = 256;
  cfg.seed = 606;
  const Hurst h(0.7);
  const auto pull = norris::norris_sweep(norris::Scenario::pullback, h, cfg, poly::systems::heisenberg());
  cfg.n_paths = 2000;
  const auto noise = norris::norris_sweep(norris::Scenario::pure_noise, h, cfg);
  const auto degen = norris::norris_sweep(norris::Scenario::degenerate, h, cfg);
  std::size_t noise_hits = 0, degen_hits = 0;
  for (const auto& r : noise.rows) noise_hits += r.hits;
  for (const auto& r : degen.rows) degen_hits += r.hits;
  const bool ok = pull.q_hat >= 0.05 && noise_hits == 0 && degen_hits == 0 && degen.q_hat == 1.0;
  return {ok, "pullback q_hat " + fmt(pull.q_hat) + " (Wilson rule " + fmt(pull.q_hat_wilson) +
                  "), pure-noise hits " + std::to_string(noise_hits) + ", degenerate hits " +
                  std::to_string(degen_hits)};
}

// ---- 7: bracket engine ----
poly::VectorField random_field(std::mt19937& g, std::size_t n) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<unsigned> deg(0, 2);
  poly::VectorField v;
  for (std::size_t i = 0; i < n; ++i) {
    poly::Polynomial p(n);
    for (int t = 0; t < 3; ++t) {
      poly::Exponents e(n);
      for (auto& x : e) x = deg(g);
      p.add_term(coef(g), e);
    }
    v.push_back(p);
  }
  return v;
}

Outcome hormander_engine() {
  using namespace hormander;
  std::vector<std::string> failures;
  auto expect = [&](bool c, const std::string& what) {
    if (!c) failures.push_back(what);
  };
  expect(hormander_check(poly::systems::elliptic(2), Vec::Zero(2), 5).n_star == 1, "elliptic N*");
  expect(hormander_check(poly::systems::heisenberg(), Vec::Zero(3), 5).n_star == 2, "Heisenberg N*");
  expect(!hormander_check(poly::systems::rank_deficient(), Vec::Zero(2), 5).satisfied, "rank-deficient");
  const auto g0 = strong_hormander_flag(poly::systems::grushin(), Vec::Zero(2), 6);
  const auto g1 = strong_hormander_flag(poly::systems::grushin(), (Vec(2) << 1, 0).finished(), 6);
  expect(g0.growth == std::vector<std::size_t>{1, 2}, "Grushin growth at 0");
  expect(g1.growth == std::vector<std::size_t>{2}, "Grushin growth off-axis");
  expect(g0.D == 3u && g1.D == 2u, "Grushin D");
  std::mt19937 g(77);
  int jacobi_fail = 0;
  for (int t = 0; t < 100; ++t) {
    const auto x = random_field(g, 3), y = random_field(g, 3), z = random_field(g, 3);
    using poly::lie_bracket;
    const auto s = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) +
                   lie_bracket(z, lie_bracket(x, y));
    if (!poly::is_zero(s)) ++jacobi_fail;
  }
  expect(jacobi_fail == 0, "Jacobi");
  std::string detail = failures.empty() ? "all checks hold, Jacobi exact on 100 triples" : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail};
}

// ---- 8: log-signature ----
Outcome log_signature() {
  const std::size_t n = 4096;
  Mat v(2, n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    v(0, k) = t;
    v(1, k) = t * t;
  }
  const auto ls = smalltime::log_signature(smalltime::iterated_integrals(TimeGrid(n), v, 2, holder::Rule::trapezoid));
  const double l12_err = std::abs(ls.at({1, 2}) - 1.0 / 12.0);
  const double H = 0.7;
  const std::size_t steps = 1024;
  const double bound = 2.0 * std::pow(1.0 / steps, 2 * H - 1);
  double worst = 0.0;
  bool antisym = true;
  const auto paths = fbm::sample_cholesky(Hurst(H), TimeGrid(steps), 2, 100, 808);
  for (const auto& p : paths) {
    const auto tab = smalltime::iterated_integrals(p, 2);
    const auto l = smalltime::log_signature(tab);
    for (unsigned i = 1; i <= 2; ++i) {
      for (unsigned j = 1; j <= 2; ++j) {
        const double r = tab.at({i, j}) + tab.at({j, i}) - p.values(i - 1, steps) * p.values(j - 1, steps);
        worst = std::max(worst, std::abs(r) / bound);
        antisym = antisym && l.at({i, j}) == -l.at({j, i});
      }
    }
  }
  return {l12_err <= 1e-6 && worst <= 1.0 && antisym,
          "|L12 - 1/12| = " + fmt(l12_err) + ", Chen residual / bound " + fmt(worst) +
              (antisym ? ", antisymmetry exact" : ", antisymmetry broken")};
}

// ---- 9: small-time exponent ----
struct SlopeCase {
  std::string name;
  poly::VectorFieldSystem sys;
  std::size_t paths;
  double target, tol;
  bool need_ci;
};

Outcome small_time() {
  poly::VectorFieldSystem elliptic = poly::systems::elliptic(2);
  const std::vector<SlopeCase> cases{
      {"additive", poly::systems::scalar_additive(), 100000, -0.6, 0.05, false},
      {"elliptic", elliptic, 100000, -1.2, 0.1, false},
      {"Heisenberg", poly::systems::heisenberg(), 200000, -2.4, 0.3, true},
  };
  const auto t = smalltime::log_grid(0.02, 0.5, 8);
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    smalltime::DensityConfig cfg;
    cfg.n_paths = c.paths;
    cfg.n_steps = 32;
    cfg.batches = 20;
    cfg.seed = 909;
    const auto pts = smalltime::density_estimate(c.sys, Vec::Zero(c.sys.n), Hurst(0.6), t, cfg);
    std::vector<double> p, se;
    for (const auto& x : pts) {
      p.push_back(x.kde);
      se.push_back(x.kde_se);
    }
    const auto fit = smalltime::exponent_fit(t, p, se);
    bool good = std::abs(fit.slope - c.target) <= c.tol;
    if (c.need_ci) good = good && fit.ci_low <= c.target && c.target <= fit.ci_high;
    ok = ok && good;
    if (!detail.empty()) detail += "; ";
    detail += c.name + " slope " + fmt(fit.slope) + " [" + fmt(fit.ci_low) + ", " + fmt(fit.ci_high) + "] vs " +
              fmt(c.target);
  }
  return {ok, detail};
}

// ---- 10: CLI determinism ----
int shell(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

Outcome determinism() {
  const std::string cli = HYPOFRAC_CLI;
  const std::string cfg = HYPOFRAC_CONFIG_DIR;
  const auto dir = std::filesystem::temp_directory_path() / "hypofrac_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"fbm.csv", "fbm sample --hurst 0.7 --dim 2 --steps 128 --paths 8 --seed 3"},
      {"fbm_v.json", "fbm sample --method volterra --steps 64 --paths 4 --format json"},
      {"reprh.json", "frac check-reprh --steps 256 --pairs 6"},
      {"sde.csv", "sde solve --config " + cfg + "/heisenberg.json --steps 64 --paths 5 --scheme heun"},
      {"gamma.json", "malliavin gamma --config " + cfg + "/grushin.json --steps 128"},
      {"probe.json", "malliavin probe --config " + cfg + "/heisenberg.json --steps 32 --paths 60 --random-directions 3"},
      {"sweep.json", "norris sweep --steps 32 --paths 200 --random-directions 2"},
      {"conc.json", "norris concentration --paths 300 --delta 0.015625 --Delta 0.125"},
      {"horm.json", "hormander check --fields " + cfg + "/grushin.json --mode strong"},
      {"small.json", "smalltime exponent --config " + cfg + "/additive1.json --paths 2000 --steps 8"},
  };
  std::size_t good = 0;
  std::string bad;
  for (const auto& [file, args] : runs) {
    const std::string out = (dir / file).string();
    bool ok = shell(cli + " --threads 1 " + args + " --out " + out) == 0;
    for (int threads : {2, 3}) {
      const std::string re = out + ".t" + std::to_string(threads);
      ok = ok && shell(cli + " --threads " + std::to_string(threads) + " replay --manifest " + out +
                       ".manifest.json --out " + re) == 0;
      ok = ok && std::filesystem::exists(re) && io::read_text(re) == io::read_text(out);
    }
    if (ok) ++good;
    else bad += " " + file;
  }
  return {good == runs.size(), std::to_string(good) + "/" + std::to_string(runs.size()) +
                                   " commands replayed byte-identically with 2 and 3 threads" +
                                   (bad.empty() ? "" : "; failed:" + bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fBm covariance", fbm_covariance},
      {"representation equivalence", representation},
      {"Malliavin derivative bump test", bump_test},
      {"Gram identity", gram_identity},
      {"concentration scaling", concentration},
      {"Norris sweep", sweep},
      {"Hormander engine", hormander_engine},
      {"log-signature", log_signature},
      {"small-time exponent", small_time},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << " [" << fmt(secs) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
