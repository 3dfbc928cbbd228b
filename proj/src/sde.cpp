#include "hypofrac/sde.hpp"

#include <algorithm>
#include <cmath>

#include "hypofrac/holder.hpp"

namespace hypofrac::sde {

std::string to_string(Scheme s) { return s == Scheme::euler ? "euler" : "heun"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "heun") return Scheme::heun;
  throw DomainError("unknown scheme '" + name + "' (expected euler|heun)");
}

namespace {

struct Step {
  const VectorFieldSystem& sys;
  double dt;
  Vec db;

  Vec f(const Vec& x) const {
    Vec out = Vec::Zero(x.size());
    if (sys.drift) out += poly::eval(*sys.drift, x) * dt;
    for (std::size_t i = 0; i < sys.d; ++i) {
      out += poly::eval(sys.fields[i], x) * db[static_cast<Eigen::Index>(i)];
    }
    return out;
  }

  Mat df(const Vec& x) const {
    Mat out = Mat::Zero(x.size(), x.size());
    if (sys.drift) out += poly::jacobian(*sys.drift, x) * dt;
    for (std::size_t i = 0; i < sys.d; ++i) {
      const double b = db[static_cast<Eigen::Index>(i)];
      if (b != 0.0) out += poly::jacobian(sys.fields[i], x) * b;
    }
    return out;
  }

  Mat fields(const Vec& x) const {
    Mat v(x.size(), static_cast<Eigen::Index>(sys.d));
    for (std::size_t i = 0; i < sys.d; ++i) v.col(static_cast<Eigen::Index>(i)) = poly::eval(sys.fields[i], x);
    return v;
  }
};

}  // namespace

SdeSolution solve(const VectorFieldSystem& sys, const Vec& x0, const TimeGrid& grid,
                  const Mat& path, Scheme scheme, bool variation) {
  sys.validate();
  if (static_cast<std::size_t>(x0.size()) != sys.n) throw DomainError("solve: x0 has wrong length");
  if (static_cast<std::size_t>(path.rows()) != sys.d) {
    throw DomainError("solve: driver dimension " + std::to_string(path.rows()) +
                      " does not match d = " + std::to_string(sys.d));
  }
  if (static_cast<std::size_t>(path.cols()) != grid.nodes()) {
    throw DomainError("solve: driver does not match the grid");
  }
  const auto n = static_cast<Eigen::Index>(sys.n);
  const auto steps = static_cast<Eigen::Index>(grid.steps());
  SdeSolution sol{grid, Mat(n, steps + 1), {}, {}, {}, scheme, 0};
  sol.X.col(0) = x0;
  const Mat eye = Mat::Identity(n, n);
  if (variation) {
    sol.J.reserve(static_cast<std::size_t>(steps + 1));
    sol.Jinv.reserve(static_cast<std::size_t>(steps + 1));
    sol.G.reserve(static_cast<std::size_t>(steps));
    sol.J.push_back(eye);
    sol.Jinv.push_back(eye);
  }
  Step step{sys, grid.mesh(), Vec()};
  for (Eigen::Index k = 0; k < steps; ++k) {
    step.db = path.col(k + 1) - path.col(k);
    const Vec x = sol.X.col(k);
    const Vec fx = step.f(x);
    Vec next;
    Mat e, g;
    if (scheme == Scheme::euler) {
      next = x + fx;
      if (variation) {
        e = eye + step.df(x);
        g = step.fields(x);
      }
    } else {
      const Vec pred = x + fx;
      next = x + 0.5 * (fx + step.f(pred));
      if (variation) {
        const Mat a = step.df(x);
        const Mat b = step.df(pred);
        e = eye + 0.5 * (a + b * (eye + a));
        const Mat vx = step.fields(x);
        g = 0.5 * (vx + step.fields(pred) + b * vx);
      }
    }
    if (!next.allFinite()) {
      throw NumericalError("solve: non-finite state at node " + std::to_string(k + 1) +
                           " (t=" + format_double(grid.node(static_cast<std::size_t>(k + 1))) + ")");
    }
    sol.X.col(k + 1) = next;
    if (variation) {
      sol.J.push_back(e * sol.J.back());
      // Jinv_{k+1} = Jinv_k E^{-1} = (E^{-T} Jinv_k^T)^T
      const Mat et = e.transpose();
      sol.Jinv.push_back(et.partialPivLu().solve(sol.Jinv.back().transpose()).transpose());
      sol.G.push_back(std::move(g));
    }
  }
  return sol;
}

SdeSolution solve(const VectorFieldSystem& sys, const Vec& x0, const fbm::FbmPath& driver,
                  Scheme scheme) {
  auto sol = solve(sys, x0, driver.grid, driver.values, scheme, false);
  sol.seed = driver.seed;
  return sol;
}

SdeSolution solve_variation(const VectorFieldSystem& sys, const Vec& x0,
                            const fbm::FbmPath& driver, Scheme scheme) {
  auto sol = solve(sys, x0, driver.grid, driver.values, scheme, true);
  sol.seed = driver.seed;
  return sol;
}

double inverse_defect(const SdeSolution& sol) {
  if (!sol.has_variation()) throw DomainError("inverse_defect: solution has no variation data");
  double worst = 0.0;
  const Mat eye = Mat::Identity(sol.J.front().rows(), sol.J.front().cols());
  for (std::size_t k = 0; k < sol.J.size(); ++k) {
    worst = std::max(worst, (sol.J[k] * sol.Jinv[k] - eye).norm());
  }
  return worst;
}

FlowCheck flow_derivative_check(const VectorFieldSystem& sys, const Vec& x0,
                                const fbm::FbmPath& driver, double eps, Scheme scheme) {
  FlowCheck rep;
  rep.eps = eps > 0.0 ? eps : 1e-5 * std::max(1.0, x0.norm());
  const auto sol = solve_variation(sys, x0, driver, scheme);
  rep.jacobian = sol.J.back();
  const auto n = x0.size();
  rep.finite_diff = Mat(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec up = x0, down = x0;
    up[i] += rep.eps;
    down[i] -= rep.eps;
    const auto a = solve(sys, up, driver, scheme);
    const auto b = solve(sys, down, driver, scheme);
    rep.finite_diff.col(i) = (a.X.col(a.X.cols() - 1) - b.X.col(b.X.cols() - 1)) / (2.0 * rep.eps);
  }
  const double scale = std::max(1.0, rep.jacobian.cwiseAbs().maxCoeff());
  rep.max_rel_error = (rep.jacobian - rep.finite_diff).cwiseAbs().maxCoeff() / scale;
  return rep;
}

namespace {

double quantile(std::vector<double> v, double level) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

MomentReport apriori_moments(const VectorFieldSystem& sys, const Vec& x0, Hurst h,
                             std::size_t n_paths, double gamma, std::size_t n_steps,
                             std::uint64_t seed, Exec exec) {
  if (!(gamma > 0.0 && gamma < h.value())) {
    throw DomainError("apriori_moments: gamma must lie in (0, H)");
  }
  MomentReport rep;
  rep.n_paths = n_paths;
  rep.gamma = gamma;
  const TimeGrid grid(n_steps);
  const fbm::CholeskySampler sampler(h, grid);
  std::vector<double> norms(n_paths, 0.0);
  std::vector<char> failed(n_paths, 0);
  for_each_index(exec, n_paths, [&](std::size_t p) {
    const auto driver = sampler.sample_one(sys.d, p, seed);
    try {
      const auto sol = solve(sys, x0, driver);
      norms[p] = holder::holder_norm(holder::SampledPath(grid, sol.X), gamma, Exec::serial);
    } catch (const NumericalError&) {
      failed[p] = 1;
    }
  });
  std::vector<double> full, half;
  for (std::size_t p = 0; p < n_paths; ++p) {
    if (failed[p]) {
      ++rep.blowups;
      continue;
    }
    full.push_back(norms[p]);
    if (p < n_paths / 2) half.push_back(norms[p]);
  }
  auto moment = [](const std::vector<double>& v, double power) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(x, power);
    return s / static_cast<double>(v.size());
  };
  for (double power : rep.powers) {
    rep.moments.push_back(moment(full, power));
    rep.half_moments.push_back(moment(half, power));
  }
  for (double level : rep.quantile_levels) {
    rep.quantiles.push_back(quantile(full, level));
    rep.half_quantiles.push_back(quantile(half, level));
  }
  return rep;
}

}  // namespace hypofrac::sde
