#include "hypofrac/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hypofrac/rng.hpp"

namespace hypofrac::fbm {

std::string to_string(Method m) { return m == Method::cholesky ? "cholesky" : "volterra"; }

Method parse_method(const std::string& name) {
  if (name == "cholesky") return Method::cholesky;
  if (name == "volterra") return Method::volterra;
  throw DomainError("unknown sampling method '" + name + "' (expected cholesky|volterra)");
}

double covariance(double hurst, double t, double s) {
  if (t < 0.0 || s < 0.0) throw DomainError("covariance: times must be non-negative");
  const double two_h = 2.0 * hurst;
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

namespace {

// int_s^t (u - s)^{H - 3/2} u^{H - 1/2} du after u = s + w^{1/(H - 1/2)}, which
// turns the endpoint singularity into a constant Jacobian.
double kernel_integral(double hurst, double t, double s) {
  const double a = hurst - 0.5;
  const double p = 1.0 / a;
  const double upper = std::pow(t - s, a);
  auto integrand = [&](double w) { return std::pow(s + std::pow(w, p), a); };
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, upper, 12,
                                                                    1e-13);
  return value / a;
}

double compute_constant(double hurst) {
  // c_H^{-2} = int_0^1 s^{1-2H} I(1, s)^2 ds
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double inner = kernel_integral(hurst, 1.0, s);
    return std::pow(s, 1.0 - 2.0 * hurst) * inner * inner;
  };
  const double mass = integrator.integrate(integrand, 0.0, 1.0, 1e-12);
  return 1.0 / std::sqrt(mass);
}

}  // namespace

double volterra_constant(Hurst h) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(h.value());
  if (it != cache.end()) return it->second;
  const double c = compute_constant(h.value());
  cache.emplace(h.value(), c);
  return c;
}

double volterra_kernel(Hurst h, double t, double s) {
  if (!(s > 0.0) || !(s < t)) throw DomainError("volterra_kernel: requires 0 < s < t");
  return volterra_constant(h) * std::pow(s, 0.5 - h.value()) * kernel_integral(h.value(), t, s);
}

// ---------------------------------------------------------------------------

namespace {

Mat node_covariance(double hurst, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.steps());
  Mat r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = covariance(hurst, grid.node(static_cast<std::size_t>(i + 1)),
                                  grid.node(static_cast<std::size_t>(j + 1)));
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

// Plain column Cholesky, only used to locate the failing pivot for diagnostics.
Eigen::Index first_bad_pivot(const Mat& a) {
  const auto n = a.rows();
  Mat l = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return j;
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return -1;
}

void fill_gaussians(rng::Stream& stream, Vec& z) {
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = stream.gaussian();
}

}  // namespace

CholeskySampler::CholeskySampler(Hurst h, TimeGrid grid) : hurst_(h), grid_(grid) {
  const Mat r = node_covariance(h.value(), grid_);
  Eigen::LLT<Mat> llt(r);
  if (llt.info() != Eigen::Success) {
    const auto pivot = first_bad_pivot(r);
    throw NumericalError("covariance factorisation failed at pivot " + std::to_string(pivot) +
                         " (node t=" + format_double(grid_.node(static_cast<std::size_t>(pivot + 1))) +
                         ")");
  }
  lower_ = llt.matrixL();
}

FbmPath CholeskySampler::sample_one(std::size_t dim, std::size_t replica,
                                    std::uint64_t seed) const {
  const auto n = static_cast<Eigen::Index>(grid_.steps());
  FbmPath path{hurst_, grid_, Mat::Zero(static_cast<Eigen::Index>(dim), n + 1), seed,
               Method::cholesky, replica};
  Vec z(n);
  for (std::size_t i = 0; i < dim; ++i) {
    rng::Stream stream(seed, "fbm", replica, i);
    fill_gaussians(stream, z);
    path.values.row(static_cast<Eigen::Index>(i)).tail(n) =
        (lower_.triangularView<Eigen::Lower>() * z).transpose();
  }
  return path;
}

std::vector<FbmPath> CholeskySampler::sample(std::size_t dim, std::size_t n_paths,
                                             std::uint64_t seed, Exec exec) const {
  std::vector<FbmPath> out(n_paths, FbmPath{hurst_, grid_, Mat(), seed, Method::cholesky, 0});
  for_each_index(exec, n_paths, [&](std::size_t p) { out[p] = sample_one(dim, p, seed); });
  return out;
}

VolterraSampler::VolterraSampler(Hurst h, TimeGrid grid) : hurst_(h), grid_(grid) {
  const auto n = static_cast<Eigen::Index>(grid_.steps());
  const double mesh = grid_.mesh();
  weights_ = Mat::Zero(n, n);
  // The kernel carries s^{1/2-H}, unbounded at s = 0, so each cell is sampled
  // at its midpoint; rows are then rescaled to the exact variance.
  for (Eigen::Index i = 1; i <= n; ++i) {
    const double t = grid_.node(static_cast<std::size_t>(i));
    double energy = 0.0;
    for (Eigen::Index k = 0; k < i; ++k) {
      const double mid = (static_cast<double>(k) + 0.5) * mesh;
      const double w = volterra_kernel(h, t, mid);
      weights_(i - 1, k) = w;
      energy += w * w * mesh;
    }
    const double target = std::pow(t, 2.0 * h.value());
    weights_.row(i - 1) *= std::sqrt(target / energy);
  }
}

FbmPath VolterraSampler::sample_one(std::size_t dim, std::size_t replica,
                                    std::uint64_t seed) const {
  const auto n = static_cast<Eigen::Index>(grid_.steps());
  FbmPath path{hurst_, grid_, Mat::Zero(static_cast<Eigen::Index>(dim), n + 1), seed,
               Method::volterra, replica};
  const double scale = std::sqrt(grid_.mesh());
  Vec dw(n);
  for (std::size_t i = 0; i < dim; ++i) {
    rng::Stream stream(seed, "fbm", replica, i);
    fill_gaussians(stream, dw);
    dw *= scale;
    path.values.row(static_cast<Eigen::Index>(i)).tail(n) =
        (weights_.triangularView<Eigen::Lower>() * dw).transpose();
  }
  return path;
}

std::vector<FbmPath> VolterraSampler::sample(std::size_t dim, std::size_t n_paths,
                                             std::uint64_t seed, Exec exec) const {
  std::vector<FbmPath> out(n_paths, FbmPath{hurst_, grid_, Mat(), seed, Method::volterra, 0});
  for_each_index(exec, n_paths, [&](std::size_t p) { out[p] = sample_one(dim, p, seed); });
  return out;
}

std::vector<FbmPath> sample_cholesky(Hurst h, const TimeGrid& grid, std::size_t dim,
                                     std::size_t n_paths, std::uint64_t seed, Exec exec) {
  return CholeskySampler(h, grid).sample(dim, n_paths, seed, exec);
}

std::vector<FbmPath> sample_volterra(Hurst h, const TimeGrid& grid, std::size_t dim,
                                     std::size_t n_paths, std::uint64_t seed, Exec exec) {
  return VolterraSampler(h, grid).sample(dim, n_paths, seed, exec);
}

// ---------------------------------------------------------------------------

CovarianceModel CovarianceModel::exact(Hurst h) {
  const double two_h = 2.0 * h.value();
  return {h.value(), [two_h](double s, double t) { return std::pow(std::abs(t - s), two_h); }};
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TypeHReport check_type_h(const CovarianceModel& model,
                         std::span<const std::pair<double, double>> pairs,
                         double exponent_tolerance) {
  TypeHReport rep;
  const double two_h = 2.0 * model.declared_hurst;
  rep.c1 = std::numeric_limits<double>::infinity();
  std::vector<double> log_lag, log_f, log_lag_mixed, log_mixed;
  for (const auto& [s, t] : pairs) {
    if (s == t) continue;
    const double lag = std::abs(t - s);
    const double f = model.f(s, t);
    const double ratio = f / std::pow(lag, two_h);
    rep.c1 = std::min(rep.c1, ratio);
    rep.c2 = std::max(rep.c2, ratio);
    const double h = lag / 100.0;
    const double mixed = (model.f(s + h, t + h) - model.f(s + h, t - h) - model.f(s - h, t + h) +
                          model.f(s - h, t - h)) /
                         (4.0 * h * h);
    rep.c3 = std::max(rep.c3, std::abs(mixed) / std::pow(lag, two_h - 2.0));
    log_lag.push_back(std::log(lag));
    log_f.push_back(f > 0 ? std::log(f) : -std::numeric_limits<double>::infinity());
    // Stencil cancellation leaves noise of order eps * f / h^2 when the
    // true mixed derivative vanishes.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f) / (h * h);
    if (std::abs(mixed) > noise) {
      log_lag_mixed.push_back(std::log(lag));
      log_mixed.push_back(std::log(std::abs(mixed)));
    }
    ++rep.pairs;
  }
  if (rep.pairs == 0) {
    rep.c1 = 0.0;
    return rep;
  }
  rep.variance_exponent = slope(log_lag, log_f);
  rep.mixed_exponent = log_mixed.size() >= 2 ? slope(log_lag_mixed, log_mixed)
                                             : std::numeric_limits<double>::quiet_NaN();
  bool variance_ok;
  if (std::isnan(rep.variance_exponent)) {
    variance_ok = rep.c1 > 0 && rep.c2 / rep.c1 <= 1.0 + exponent_tolerance;
  } else {
    variance_ok = rep.c1 > 0 && std::abs(rep.variance_exponent - two_h) <= exponent_tolerance;
  }
  const bool mixed_ok = std::isnan(rep.mixed_exponent) ||
                        rep.mixed_exponent >= two_h - 2.0 - exponent_tolerance;
  rep.pass = variance_ok && mixed_ok && std::isfinite(rep.c2) && std::isfinite(rep.c3);
  return rep;
}

}  // namespace hypofrac::fbm
