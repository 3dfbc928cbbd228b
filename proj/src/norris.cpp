#include "hypofrac/norris.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypofrac/malliavin.hpp"
#include "hypofrac/sde.hpp"

namespace hypofrac::norris {

namespace {

std::size_t integral_inverse(double x, const char* what) {
  const double inv = 1.0 / x;
  const double r = std::round(inv);
  if (!(x > 0.0) || r < 1.0 || std::abs(inv - r) > 1e-9 * inv) {
    throw DomainError(std::string(what) + " must be the reciprocal of a positive integer, got " +
                      format_double(x));
  }
  return static_cast<std::size_t>(r);
}

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  Fit f;
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) {
    f.slope = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      rss += e * e;
    }
    f.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

}  // namespace

void CoarseQvConfig::validate() const {
  const auto fine = integral_inverse(delta, "delta");
  const auto coarse = integral_inverse(Delta, "Delta");
  if (fine % coarse != 0) throw DomainError("coarse_qv: 1/Delta must divide 1/delta");
}

std::size_t CoarseQvConfig::fine_steps() const { return integral_inverse(delta, "delta"); }
std::size_t CoarseQvConfig::blocks() const { return integral_inverse(Delta, "Delta"); }
std::size_t CoarseQvConfig::r() const { return fine_steps() / blocks(); }

NorrisStatistics coarse_qv(const fbm::FbmPath& driver, const CoarseQvConfig& cfg) {
  cfg.validate();
  const auto& grid = driver.grid;
  if (std::abs(grid.horizon() - 1.0) > 1e-12) throw DomainError("coarse_qv: driver must live on [0, 1]");
  const double ratio = cfg.delta / grid.mesh();
  const double stride_d = std::round(ratio);
  if (stride_d < 1.0 || std::abs(ratio - stride_d) > 1e-9 * ratio) {
    throw DomainError("coarse_qv: the driver grid does not refine delta");
  }
  const auto stride = static_cast<Eigen::Index>(stride_d);
  const std::size_t r = cfg.r();
  const std::size_t blocks = cfg.blocks();
  const auto d = static_cast<Eigen::Index>(driver.dim());
  NorrisStatistics st;
  st.r = r;
  for (std::size_t b = 0; b < blocks; ++b) {
    Mat x = Mat::Zero(d, d);
    for (std::size_t n = b * r; n < (b + 1) * r; ++n) {
      const auto k = static_cast<Eigen::Index>(n) * stride;
      const Vec inc = driver.values.col(k + stride) - driver.values.col(k);
      x.noalias() += inc * inc.transpose();
    }
    st.Y.push_back(x.diagonal().cwiseMax(0.0).cwiseSqrt());
    st.Y_cross.push_back(x.cwiseAbs().cwiseSqrt());
    st.X.push_back(std::move(x));
  }
  const double h = driver.hurst.value();
  for (std::size_t n = 1; n <= r; ++n) {
    const double t = static_cast<double>(n) * cfg.delta;
    const double s = t - cfg.delta;
    st.T2 += std::pow(std::abs(t - s), 2.0 * h);
  }
  return st;
}

ConcentrationReport concentration_experiment(Hurst h, const CoarseQvConfig& cfg,
                                             std::size_t n_paths, std::uint64_t seed, double p_lo,
                                             double p_hi, Exec exec) {
  cfg.validate();
  const TimeGrid grid(cfg.fine_steps());
  const fbm::CholeskySampler sampler(h, grid);
  const std::size_t blocks = cfg.blocks();
  std::vector<std::vector<double>> dev(n_paths), cross(n_paths);
  double t2 = 0.0;
  for_each_index(exec, n_paths, [&](std::size_t p) {
    const auto st = coarse_qv(sampler.sample_one(2, p, seed), cfg);
    const double t = std::sqrt(st.T2);
    for (std::size_t b = 0; b < blocks; ++b) {
      for (Eigen::Index i = 0; i < 2; ++i) dev[p].push_back(std::abs(st.Y[b][i] - t));
      cross[p].push_back(std::abs(st.X[b](0, 1)));
    }
    if (p == 0) t2 = st.T2;
  });
  if (n_paths == 0) throw DomainError("concentration_experiment: need at least one path");
  std::vector<double> all, all_cross;
  for (std::size_t p = 0; p < n_paths; ++p) {
    all.insert(all.end(), dev[p].begin(), dev[p].end());
    all_cross.insert(all_cross.end(), cross[p].begin(), cross[p].end());
  }
  ConcentrationReport rep;
  rep.delta = cfg.delta;
  rep.N = cfg.r();
  rep.T = std::sqrt(t2);
  rep.samples = all.size();
  rep.predicted_scale = static_cast<double>(rep.N) /
                        std::pow(cfg.delta * static_cast<double>(rep.N), 2.0 * h.value());
  std::sort(all.begin(), all.end(), std::greater<>());
  std::sort(all_cross.begin(), all_cross.end(), std::greater<>());
  const double m = static_cast<double>(all.size());

  std::vector<double> xs, ys;
  const double lo_rank = p_lo * m, hi_rank = p_hi * m;
  // order statistics thinned to an even spacing in log rank
  for (double lr = std::log(std::max(1.0, lo_rank)); lr <= std::log(hi_rank); lr += 0.01) {
    const auto k = static_cast<std::size_t>(std::round(std::exp(lr)));
    if (k < 1 || k > all.size()) continue;
    const double hval = all[k - 1];
    if (!xs.empty() && hval * hval == xs.back()) continue;
    xs.push_back(hval * hval);
    ys.push_back(std::log(static_cast<double>(k) / m));
  }
  const Fit fit = least_squares(xs, ys);
  rep.rate = -fit.slope;
  rep.rate_stderr = fit.stderr_slope;
  rep.fit_points = xs.size();

  const double hmax = all.empty() ? 0.0 : all.front();
  const double cmax = all_cross.empty() ? 0.0 : std::sqrt(all_cross.front());
  constexpr int table = 24;
  for (int i = 0; i <= table; ++i) {
    const double hv = hmax * i / table;
    const auto cnt = std::count_if(all.begin(), all.end(), [&](double v) { return v >= hv; });
    rep.tail.push_back({hv, static_cast<double>(cnt) / m});
    const double hc = cmax * i / table;
    const auto cc = std::count_if(all_cross.begin(), all_cross.end(), [&](double v) { return v >= hc * hc; });
    rep.cross_tail.push_back({hc, static_cast<double>(cc) / static_cast<double>(all_cross.size())});
  }
  return rep;
}

ScalingReport concentration_scaling(Hurst h, const CoarseQvConfig& base, std::size_t n_paths,
                                    std::uint64_t seed, double tolerance, Exec exec) {
  ScalingReport rep;
  rep.base = concentration_experiment(h, base, n_paths, seed, 1e-3, 1e-1, exec);
  CoarseQvConfig fine{base.delta / 2.0, base.Delta};
  rep.refined = concentration_experiment(h, fine, n_paths, seed + 1, 1e-3, 1e-1, exec);
  rep.observed_ratio = rep.refined.rate / rep.base.rate;
  rep.predicted_ratio = rep.refined.predicted_scale / rep.base.predicted_scale;
  rep.relative_error = std::abs(rep.observed_ratio / rep.predicted_ratio - 1.0);
  rep.pass = rep.relative_error <= tolerance;
  return rep;
}

HsReport hs_bound_check(Hurst h, const std::vector<std::size_t>& Ns, double span, double tolerance) {
  HsReport rep;
  rep.predicted = 4.0 * h.value() - 2.0;
  std::vector<double> lx, ly, lr;
  for (std::size_t n : Ns) {
    if (n == 0) throw DomainError("hs_bound_check: N must be positive");
    const double delta = span / static_cast<double>(n);
    auto node = [&](std::size_t k) { return static_cast<double>(k) * delta; };
    double hs2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double g = fbm::covariance(h, node(a + 1), node(b + 1)) -
                         fbm::covariance(h, node(a + 1), node(b)) -
                         fbm::covariance(h, node(a), node(b + 1)) + fbm::covariance(h, node(a), node(b));
        if (rep.N.empty() && a == 0 && b == 0) rep.diagonal = g;
        hs2 += g * g;
      }
    }
    rep.N.push_back(n);
    rep.delta.push_back(delta);
    rep.hs2.push_back(hs2);
    const double norm = hs2 / std::pow(delta, 4.0 * h.value());
    rep.hs2_normalised.push_back(norm);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(norm));
    lr.push_back(std::log(hs2));
  }
  if (Ns.size() >= 2) {
    rep.slope = least_squares(lx, ly).slope;
    rep.raw_slope = least_squares(lx, lr).slope;
    rep.pass = std::abs(rep.slope - rep.predicted) <= tolerance;
  }
  return rep;
}

double alpha_limit(double hurst) {
  return hurst * (1.0 - hurst) / ((1.0 + hurst) * (2.0 - hurst));
}

ScaleChoice scale_choices(double eps, Hurst h) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("scale_choices: eps must lie in (0, 1)");
  const double H = h.value();
  ScaleChoice sc;
  sc.eps = eps;
  sc.alpha = alpha_limit(H);
  sc.gamma = std::pow(eps, sc.alpha);
  sc.delta_exact = std::pow(eps, 1.0 / (H * (2.0 - H)));
  sc.Delta_exact = std::pow(eps, (1.0 - H) / (H * (2.0 - H)));
  const double coarse = std::max(1.0, std::floor(1.0 / sc.Delta_exact));
  sc.Delta = 1.0 / coarse;
  const double fine = std::max(1.0, std::ceil(1.0 / sc.delta_exact / coarse)) * coarse;
  sc.delta = 1.0 / fine;
  sc.degenerate = coarse == 1.0 || fine == coarse;
  return sc;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::pure_noise: return "pure_noise";
    case Scenario::pure_drift: return "pure_drift";
    case Scenario::degenerate: return "degenerate";
    case Scenario::pullback: return "pullback";
    case Scenario::pullback_integral: return "pullback_integral";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  for (auto s : {Scenario::pure_noise, Scenario::pure_drift, Scenario::degenerate, Scenario::pullback,
                 Scenario::pullback_integral}) {
    if (to_string(s) == name) return s;
  }
  throw DomainError("unknown scenario '" + name +
                    "' (expected pure_noise|pure_drift|degenerate|pullback|pullback_integral)");
}

double wilson_upper(std::size_t hits, std::size_t n, double z) {
  if (n == 0) return 1.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return std::min(1.0, (centre + half) / (1.0 + z2 / nn));
}

namespace {

// sup |y| and sup |a| + sup |b| for each probe combination on one path.
using Extremes = std::vector<std::pair<double, double>>;

struct PullbackSetup {
  const poly::VectorFieldSystem& sys;
  std::vector<Vec> directions;
  std::vector<poly::VectorField> drift_brackets;             // [V0, V_k]
  std::vector<std::vector<poly::VectorField>> brackets;     // [V_j, V_k]
};

Extremes pullback_path(const PullbackSetup& s, const fbm::FbmPath& driver, bool integral) {
  const auto& sys = s.sys;
  const Vec x0 = sys.start();
  const auto sol = sde::solve_variation(sys, x0, driver);
  const std::size_t nodes = sol.grid.nodes();
  const std::size_t nv = s.directions.size();
  if (integral) {
    Extremes out(nv, {0.0, 0.0});
    std::vector<double> y(nv, 0.0), bmax(nv, 0.0);
    std::vector<Vec> prev(sys.d);
    for (std::size_t k = 0; k < nodes; ++k) {
      const Vec x = sol.state(k);
      for (std::size_t j = 0; j < sys.d; ++j) {
        prev[j] = sol.Jinv[k] * poly::eval(sys.fields[j], x);
      }
      for (std::size_t v = 0; v < nv; ++v) {
        double bnorm2 = 0.0;
        for (std::size_t j = 0; j < sys.d; ++j) {
          const double bj = s.directions[v].dot(prev[j]);
          bnorm2 += bj * bj;
        }
        bmax[v] = std::max(bmax[v], std::sqrt(bnorm2));
      }
      if (k + 1 < nodes) {
        for (std::size_t v = 0; v < nv; ++v) {
          for (std::size_t j = 0; j < sys.d; ++j) {
            y[v] += s.directions[v].dot(prev[j]) * driver.increment(j, k);
          }
          out[v].first = std::max(out[v].first, std::abs(y[v]));
        }
      }
    }
    for (std::size_t v = 0; v < nv; ++v) out[v].second = bmax[v];
    return out;
  }
  const std::size_t nb = sys.d;
  Extremes out(nb * nv, {0.0, 0.0});
  std::vector<double> amax(nb * nv, 0.0), bmax(nb * nv, 0.0);
  std::vector<Vec> base0(nb);
  for (std::size_t k = 0; k < nodes; ++k) {
    const Vec x = sol.state(k);
    const Mat& jinv = sol.Jinv[k];
    for (std::size_t b = 0; b < nb; ++b) {
      const Vec base = jinv * poly::eval(sys.fields[b], x);
      if (k == 0) base0[b] = base;
      const Vec drift = jinv * poly::eval(s.drift_brackets[b], x);
      std::vector<Vec> diff(sys.d);
      for (std::size_t j = 0; j < sys.d; ++j) diff[j] = jinv * poly::eval(s.brackets[b][j], x);
      for (std::size_t v = 0; v < nv; ++v) {
        const Vec& dir = s.directions[v];
        const std::size_t c = b * nv + v;
        out[c].first = std::max(out[c].first, std::abs(dir.dot(base - base0[b])));
        amax[c] = std::max(amax[c], std::abs(dir.dot(drift)));
        double bn2 = 0.0;
        for (std::size_t j = 0; j < sys.d; ++j) {
          const double bj = dir.dot(diff[j]);
          bn2 += bj * bj;
        }
        bmax[c] = std::max(bmax[c], std::sqrt(bn2));
      }
    }
  }
  for (std::size_t c = 0; c < out.size(); ++c) out[c].second = amax[c] + bmax[c];
  return out;
}

}  // namespace

SweepReport norris_sweep(Scenario scenario, Hurst h, const SweepConfig& cfg,
                         const poly::VectorFieldSystem& sys_in, Exec exec) {
  SweepReport rep;
  rep.scenario = scenario;
  rep.hurst = h.value();
  rep.eps_grid = cfg.eps_grid;
  rep.q_grid = cfg.q_grid;
  if (rep.q_grid.empty()) {
    for (int i = 1; i <= 20; ++i) rep.q_grid.push_back(0.05 * i);
  }
  for (double e : rep.eps_grid) {
    if (!(e > 0.0 && e < 1.0)) throw DomainError("norris_sweep: eps values must lie in (0, 1)");
  }
  rep.n_paths = cfg.n_paths;
  rep.n_steps = cfg.n_steps;
  rep.alpha = alpha_limit(h.value());
  for (double e : rep.eps_grid) rep.scales.push_back(scale_choices(e, h));

  const bool pull = scenario == Scenario::pullback || scenario == Scenario::pullback_integral;
  const poly::VectorFieldSystem sys = (pull && sys_in.n == 0) ? poly::systems::heisenberg() : sys_in;
  if (pull) sys.validate();
  PullbackSetup setup{sys, {}, {}, {}};
  if (pull) {
    setup.directions = malliavin::probe_directions(sys.n, cfg.random_directions, cfg.seed);
    const auto v0 = sys.letter(0);
    for (std::size_t b = 0; b < sys.d; ++b) {
      setup.drift_brackets.push_back(poly::lie_bracket(v0, sys.fields[b]));
      std::vector<poly::VectorField> row;
      for (std::size_t j = 0; j < sys.d; ++j) row.push_back(poly::lie_bracket(sys.fields[j], sys.fields[b]));
      setup.brackets.push_back(std::move(row));
    }
  }
  const TimeGrid grid(cfg.n_steps);
  const std::size_t dim = pull ? sys.d : 1;
  const fbm::CholeskySampler sampler(h, grid);
  std::vector<Extremes> results(cfg.n_paths);
  for_each_index(exec, cfg.n_paths, [&](std::size_t p) {
    switch (scenario) {
      case Scenario::pure_noise: {
        const auto driver = sampler.sample_one(dim, p, cfg.seed);
        results[p] = {{driver.values.row(0).cwiseAbs().maxCoeff(), 1.0}};
        break;
      }
      case Scenario::pure_drift:
        results[p] = {{grid.horizon(), 1.0}};
        break;
      case Scenario::degenerate:
        results[p] = {{0.0, 0.0}};
        break;
      default: {
        const auto driver = sampler.sample_one(dim, p, cfg.seed);
        results[p] = pullback_path(setup, driver, scenario == Scenario::pullback_integral);
      }
    }
  });
  rep.combinations = results.empty() ? 0 : results.front().size();
  bool all_null = true, all_null_wilson = true;
  for (double q : rep.q_grid) {
    bool null_here = true, null_wilson = true;
    for (double eps : rep.eps_grid) {
      const double thresh = std::pow(eps, q);
      std::size_t worst = 0;
      for (std::size_t c = 0; c < rep.combinations; ++c) {
        std::size_t hits = 0;
        for (const auto& r : results) {
          if (r[c].first < eps && r[c].second > thresh) ++hits;
        }
        worst = std::max(worst, hits);
      }
      SweepRow row{q, eps, worst, static_cast<double>(worst) / static_cast<double>(cfg.n_paths),
                   wilson_upper(worst, cfg.n_paths)};
      if (worst != 0) null_here = false;
      if (!(row.wilson_upper < 1.0 / static_cast<double>(cfg.n_paths))) null_wilson = false;
      rep.rows.push_back(row);
    }
    all_null = all_null && null_here;
    all_null_wilson = all_null_wilson && null_wilson;
    if (all_null) rep.q_hat = q;
    if (all_null_wilson) rep.q_hat_wilson = q;
  }
  return rep;
}

}  // namespace hypofrac::norris
