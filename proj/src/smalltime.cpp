#include "hypofrac/smalltime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "hypofrac/sde.hpp"

namespace hypofrac::smalltime {

double IteratedIntegralTable::at(const Word& w) const {
  auto it = values.find(w);
  if (it == values.end()) throw DomainError("iterated integral table has no word " + std::to_string(w.size()));
  return it->second;
}

double LogSignature::at(const Word& w) const {
  auto it = values.find(w);
  if (it == values.end()) throw DomainError("log signature has no such word");
  return it->second;
}

IteratedIntegralTable iterated_integrals(const TimeGrid& grid, const Mat& path, std::size_t K,
                                         holder::Rule rule) {
  if (K == 0 || K > 4) throw DomainError("iterated_integrals: level must lie in 1..4");
  if (static_cast<std::size_t>(path.cols()) != grid.nodes()) {
    throw DomainError("iterated_integrals: path does not match the grid");
  }
  const auto d = static_cast<std::size_t>(path.rows());
  const auto nodes = path.cols();
  IteratedIntegralTable table;
  table.d = d;
  table.K = K;
  table.horizon = grid.horizon();
  std::map<Word, Vec> running;
  for (std::size_t i = 0; i < d; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    Vec r = path.row(row).transpose().array() - path(row, 0);
    running[{static_cast<unsigned>(i + 1)}] = r;
  }
  std::map<Word, Vec> level = running;
  for (std::size_t k = 2; k <= K; ++k) {
    std::map<Word, Vec> next;
    for (const auto& [w, r] : level) {
      for (std::size_t i = 0; i < d; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        Vec out = Vec::Zero(nodes);
        for (Eigen::Index m = 0; m + 1 < nodes; ++m) {
          const double db = path(row, m + 1) - path(row, m);
          const double f = rule == holder::Rule::left ? r[m] : 0.5 * (r[m] + r[m + 1]);
          out[m + 1] = out[m] + f * db;
        }
        Word nw = w;
        nw.push_back(static_cast<unsigned>(i + 1));
        next.emplace(std::move(nw), std::move(out));
      }
    }
    running.insert(next.begin(), next.end());
    level = std::move(next);
  }
  for (const auto& [w, r] : running) table.values[w] = r[nodes - 1];
  return table;
}

IteratedIntegralTable iterated_integrals(const fbm::FbmPath& driver, std::size_t K, holder::Rule rule) {
  return iterated_integrals(driver.grid, driver.values, K, rule);
}

std::size_t raising_count(const std::vector<unsigned>& sigma) {
  std::vector<unsigned> sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i + 1) throw DomainError("raising_count: not a permutation of 1..k");
  }
  std::size_t e = 0;
  for (std::size_t j = 0; j + 1 < sigma.size(); ++j) {
    if (sigma[j] > sigma[j + 1]) ++e;
  }
  return e;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  double b = 1.0;
  for (std::size_t i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  return b;
}

}  // namespace

LogSignature log_signature(const IteratedIntegralTable& table) {
  LogSignature ls;
  ls.K = table.K;
  for (const auto& [word, unused] : table.values) {
    (void)unused;
    const std::size_t k = word.size();
    std::vector<unsigned> sigma(k);
    std::iota(sigma.begin(), sigma.end(), 1u);
    double total = 0.0;
    do {
      const std::size_t e = raising_count(sigma);
      std::vector<unsigned> inv(k);
      for (std::size_t j = 0; j < k; ++j) inv[sigma[j] - 1] = static_cast<unsigned>(j + 1);
      Word permuted(k);
      for (std::size_t j = 0; j < k; ++j) permuted[j] = word[inv[j] - 1];
      const double coeff = ((e % 2) ? -1.0 : 1.0) / (static_cast<double>(k * k) * binomial(k - 1, e));
      total += coeff * table.at(permuted);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    ls.values[word] = total;
  }
  return ls;
}

poly::VectorField chen_field(const poly::VectorFieldSystem& sys, const LogSignature& ls, std::size_t N) {
  sys.validate();
  std::map<Word, poly::VectorField> brackets;
  poly::VectorField w = poly::zero_field(sys.n);
  for (const auto& [word, lambda] : ls.values) {
    if (word.size() > N) continue;
    // V_I memoised by word; suffixes are built on demand.
    std::function<poly::VectorField(const Word&)> field = [&](const Word& v) -> poly::VectorField {
      auto it = brackets.find(v);
      if (it != brackets.end()) return it->second;
      poly::VectorField f = v.size() == 1 ? sys.fields.at(v[0] - 1)
                                          : poly::lie_bracket(sys.fields.at(v[0] - 1),
                                                              field(Word(v.begin() + 1, v.end())));
      brackets.emplace(v, f);
      return f;
    };
    if (lambda != 0.0) w = w + lambda * field(word);
  }
  return w;
}

Vec flow_unit_time(const poly::VectorField& w, const Vec& x0, double tol) {
  auto rk4 = [&](const Vec& y, double h) {
    const Vec k1 = poly::eval(w, y);
    const Vec k2 = poly::eval(w, y + 0.5 * h * k1);
    const Vec k3 = poly::eval(w, y + 0.5 * h * k2);
    const Vec k4 = poly::eval(w, y + h * k3);
    return Vec(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  Vec y = x0;
  double t = 0.0, h = 0.1;
  for (std::size_t iter = 0; t < 1.0; ++iter) {
    if (iter > 1000000) throw NumericalError("flow_unit_time: step control did not converge");
    h = std::min(h, 1.0 - t);
    const Vec big = rk4(y, h);
    const Vec half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    if (!half.allFinite()) throw NumericalError("flow_unit_time: flow blew up at s=" + format_double(t));
    const double err = (half - big).norm() / 15.0;
    const double scale = tol * std::max(1.0, half.norm());
    if (err <= scale || h < 1e-12) {
      t += h;
      y = half + (half - big) / 15.0;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
    h *= std::clamp(factor, 0.1, 4.0);
  }
  return y;
}

Vec chen_approximation(const poly::VectorFieldSystem& sys, const Vec& x0, const fbm::FbmPath& driver,
                       std::size_t N, holder::Rule rule, double tol) {
  if (N == 0 || N > 3) throw DomainError("chen_approximation: level must lie in 1..3");
  if (sys.drift && !poly::is_zero(*sys.drift)) throw DomainError("chen_approximation: drift is not supported");
  const auto table = iterated_integrals(driver, N, rule);
  return flow_unit_time(chen_field(sys, log_signature(table), N), x0, tol);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

std::vector<DensityPoint> density_estimate(const poly::VectorFieldSystem& sys, const Vec& x0, Hurst h,
                                           const std::vector<double>& t_grid, const DensityConfig& cfg,
                                           Exec exec) {
  sys.validate();
  if (sys.drift && !poly::is_zero(*sys.drift)) throw DomainError("density_estimate: the system must be driftless");
  if (cfg.n_paths < 2 * cfg.batches || cfg.batches < 2) throw DomainError("density_estimate: too few paths");
  const auto n = static_cast<Eigen::Index>(sys.n);
  const std::size_t N = cfg.n_paths;
  std::vector<DensityPoint> out;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("density_estimate: times must lie in (0, 1]");
    const TimeGrid grid(cfg.n_steps, t);
    const fbm::CholeskySampler sampler(h, grid);
    Mat ends(n, static_cast<Eigen::Index>(N));
    for_each_index(exec, N, [&](std::size_t p) {
      const auto driver = sampler.sample_one(sys.d, ti * N + p, cfg.seed);
      const auto sol = sde::solve(sys, x0, driver);
      ends.col(static_cast<Eigen::Index>(p)) = sol.X.col(sol.X.cols() - 1);
    });
    const Vec mean = ends.rowwise().mean();
    const Vec sd = ((ends.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(N - 1)).sqrt();
    const double nd = static_cast<double>(n);
    const double factor = std::pow(4.0 / ((nd + 2.0) * static_cast<double>(N)), 1.0 / (nd + 4.0));
    const Vec bw = sd * factor;
    DensityPoint pt;
    pt.t = t;
    pt.bandwidth.assign(bw.data(), bw.data() + n);
    const double norm = std::pow(2.0 * std::numbers::pi, -nd / 2.0) / bw.prod();
    std::vector<double> kern(N);
    for_each_index(exec, N, [&](std::size_t p) {
      const Vec z = (ends.col(static_cast<Eigen::Index>(p)) - x0).cwiseQuotient(bw);
      kern[p] = norm * std::exp(-0.5 * z.squaredNorm());
    });
    const std::size_t per = N / cfg.batches;
    std::vector<double> batch(cfg.batches, 0.0);
    double total = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
      total += kern[p];
      const std::size_t b = p / per;
      if (b < cfg.batches) batch[b] += kern[p];
    }
    pt.kde = total / static_cast<double>(N);
    double bm = 0.0;
    for (auto& b : batch) {
      b /= static_cast<double>(per);
      bm += b / static_cast<double>(cfg.batches);
    }
    double bv = 0.0;
    for (double b : batch) bv += (b - bm) * (b - bm);
    bv /= static_cast<double>(cfg.batches - 1);
    pt.kde_se = std::sqrt(bv / static_cast<double>(cfg.batches));

    std::vector<double> dist(N);
    for (std::size_t p = 0; p < N; ++p) {
      dist[p] = (ends.col(static_cast<Eigen::Index>(p)) - x0).cwiseQuotient(sd).norm();
    }
    const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(N))));
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    const double rk = dist[k - 1];
    const double ball = std::pow(std::numbers::pi, nd / 2.0) / std::tgamma(nd / 2.0 + 1.0) * std::pow(rk, nd);
    pt.knn = static_cast<double>(k) / (static_cast<double>(N) * ball) / sd.prod();
    out.push_back(std::move(pt));
  }
  return out;
}

ExponentFit exponent_fit(const std::vector<double>& t, const std::vector<double>& p,
                         const std::vector<double>& se) {
  if (t.size() != p.size() || (!se.empty() && se.size() != p.size())) {
    throw DomainError("exponent_fit: input lengths differ");
  }
  ExponentFit fit;
  std::vector<double> x, y, w;
  bool weighted = !se.empty();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(p[i] > 0.0)) {
      fit.warnings.push_back("dropped t=" + format_double(t[i]) + ": non-positive density estimate");
      continue;
    }
    x.push_back(std::log(t[i]));
    y.push_back(std::log(p[i]));
    if (weighted) {
      if (!(se[i] > 0.0)) weighted = false;
      else w.push_back((p[i] / se[i]) * (p[i] / se[i]));
    }
  }
  if (!weighted) w.assign(x.size(), 1.0);
  fit.points = x.size();
  if (x.size() < 4) throw DomainError("exponent_fit: need at least 4 usable points");
  const double span = *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
  if (span < std::log(10.0) - 1e-12) throw DomainError("exponent_fit: times must span at least one decade");
  double sw = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    mx += w[i] * x[i];
    my += w[i] * y[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double chi2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    chi2 += w[i] * r * r;
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  fit.chi2_dof = chi2 / dof;
  double se_slope = std::sqrt(1.0 / sxx);
  if (!weighted) se_slope = std::sqrt(fit.chi2_dof / sxx);
  else if (fit.chi2_dof > 1.0) se_slope *= std::sqrt(fit.chi2_dof);
  fit.stderr_slope = se_slope;
  fit.ci_low = fit.slope - 1.96 * se_slope;
  fit.ci_high = fit.slope + 1.96 * se_slope;
  return fit;
}

}  // namespace hypofrac::smalltime
