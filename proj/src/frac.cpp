#include "hypofrac/frac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypofrac/kernels.hpp"
#include "hypofrac/rng.hpp"

namespace hypofrac::frac {

namespace {

void check_order(double alpha, const char* op) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(std::string(op) + ": order must lie in (0, 1), got " + format_double(alpha));
  }
}

// Cell weights of I^a for piecewise constant input, lag m = 1.. up to len-1.
std::vector<double> constant_weights(double a, double mesh, std::size_t len) {
  std::vector<double> w(len, 0.0);
  const double scale = std::pow(mesh, a) / std::tgamma(a + 1.0);
  for (std::size_t m = 1; m < len; ++m) {
    const double md = static_cast<double>(m);
    w[m] = scale * (std::pow(md, a) - std::pow(md - 1.0, a));
  }
  return w;
}

}  // namespace

SampledPath frac_integral(const SampledPath& phi, double alpha, Exec exec) {
  check_order(alpha, "frac_integral");
  const std::size_t nodes = phi.nodes();
  const auto w = constant_weights(alpha, phi.grid.mesh(), nodes);
  return SampledPath(phi.grid, kernels::lower_toeplitz_apply(w, phi.values, nodes, exec));
}

SampledPath frac_derivative(const SampledPath& f, double alpha, std::vector<std::string>* warnings,
                            Exec exec) {
  check_order(alpha, "frac_derivative");
  if (warnings && f.values.col(0).norm() != 0.0) {
    warnings->push_back("frac_derivative: f(0) != 0, expect a boundary layer near t = 0");
  }
  const double b = 1.0 - alpha;
  const double mesh = f.grid.mesh();
  const std::size_t nodes = f.nodes();
  // For lag m the linear interpolant on cell [t_{i-m}, t_{i-m+1}] contributes
  // f_{i-m} (A_m - B_m) + f_{i-m+1} B_m.
  std::vector<double> left(nodes + 1, 0.0), right(nodes + 1, 0.0);
  const double scale = std::pow(mesh, b) / std::tgamma(b);
  for (std::size_t m = 1; m <= nodes; ++m) {
    const double md = static_cast<double>(m);
    const double pa = std::pow(md, b) - std::pow(md - 1.0, b);
    const double pb = std::pow(md, b + 1.0) - std::pow(md - 1.0, b + 1.0);
    const double a_m = pa / b;
    const double b_m = md * pa / b - pb / (b + 1.0);
    left[m] = scale * (a_m - b_m);
    right[m] = scale * b_m;
  }
  const Mat part_left = kernels::lower_toeplitz_apply(left, f.values, nodes, exec);
  // sum_{k<i} right[i-k] f_{k+1} = shifted[i+1] - right[i+1] f_0
  const Mat shifted = kernels::lower_toeplitz_apply(right, f.values, nodes + 1, exec);
  Mat integral(f.values.rows(), static_cast<Eigen::Index>(nodes));
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    integral.col(c) = part_left.col(c) + shifted.col(c + 1) - right[i + 1] * f.values.col(0);
  }
  integral.col(0).setZero();
  Mat out(integral.rows(), integral.cols());
  for (Eigen::Index i = 1; i < out.cols(); ++i) out.col(i) = (integral.col(i) - integral.col(i - 1)) / mesh;
  out.col(0) = out.col(1);
  return SampledPath(f.grid, std::move(out));
}

SampledPath frac_derivative_minus(const SampledPath& f, double alpha, Exec exec) {
  check_order(alpha, "frac_derivative_minus");
  const double mesh = f.grid.mesh();
  const double horizon = f.grid.horizon();
  const auto n = static_cast<Eigen::Index>(f.grid.steps());
  const auto rows = f.values.rows();
  const double pref = -alpha / std::tgamma(1.0 - alpha);
  Mat out = Mat::Zero(rows, n + 1);
  for_each_index(exec, static_cast<std::size_t>(n + 1), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const double t = f.grid.node(idx);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double fi = f.values(r, i);
      double acc = 0.0;
      if (i < n) {
        acc += (f.values(r, i + 1) - fi) / mesh * std::pow(mesh, 1.0 - alpha) / (1.0 - alpha);
      }
      for (Eigen::Index k = i + 1; k < n; ++k) {
        const double a = static_cast<double>(k - i) * mesh;
        const double b = a + mesh;
        const double slope = (f.values(r, k + 1) - f.values(r, k)) / mesh;
        const double w0 = (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
        const double w1 = (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) / (1.0 - alpha) - a * w0;
        acc += (f.values(r, k) - fi) * w0 + slope * w1;
      }
      if (fi != 0.0) acc -= fi * std::pow(horizon - t, -alpha) / alpha;
      out(r, i) = pref * acc;
    }
  });
  return SampledPath(f.grid, std::move(out));
}

std::vector<double> cell_masses(Hurst h, std::size_t cells, double mesh) {
  const double two_h = 2.0 * h.value();
  const double scale = std::pow(mesh, two_h);
  std::vector<double> w(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double kd = static_cast<double>(k);
    w[k] = 0.5 * scale *
           (std::pow(kd + 1.0, two_h) - 2.0 * std::pow(kd, two_h) + std::pow(std::abs(kd - 1.0), two_h));
  }
  return w;
}

namespace {

void check_pair(const SampledPath& phi, const SampledPath& psi) {
  if (!(phi.grid == psi.grid)) throw DomainError("inner product: grid mismatch");
  if (phi.dim() != psi.dim()) throw DomainError("inner product: dimension mismatch");
}

// Cell values, i.e. all nodes but the last.
Mat cells_of(const SampledPath& p) { return p.values.leftCols(p.values.cols() - 1); }

}  // namespace

double h_inner_kernel(const SampledPath& phi, const SampledPath& psi, Hurst h, Exec exec) {
  check_pair(phi, psi);
  const std::size_t n = phi.grid.steps();
  const auto w = cell_masses(h, n, phi.grid.mesh());
  return kernels::toeplitz_bilinear(w, cells_of(phi), cells_of(psi), exec);
}

FracInner h_inner_frac_report(const SampledPath& phi, const SampledPath& psi, Hurst h,
                              double horizon, Exec exec) {
  check_pair(phi, psi);
  if (!(horizon >= 2.0)) throw DomainError("h_inner_frac: horizon must be at least 2");
  const double alpha = h.value() - 0.5;
  const double mesh = phi.grid.mesh();
  const double span = phi.grid.horizon();
  const std::size_t n = phi.grid.steps();
  const auto ext = static_cast<std::size_t>(std::ceil(horizon * static_cast<double>(n)));
  const double top = static_cast<double>(ext) * mesh;

  const auto w = constant_weights(alpha, mesh, ext + 1);
  const Mat a = kernels::lower_toeplitz_apply(w, cells_of(phi), ext + 1, exec);
  const Mat b = kernels::lower_toeplitz_apply(w, cells_of(psi), ext + 1, exec);
  const Vec prod = (a.array() * b.array()).colwise().sum().transpose();
  double body = 0.5 * (prod[0] + prod[prod.size() - 1]);
  for (Eigen::Index k = 1; k + 1 < prod.size(); ++k) body += prod[k];
  body *= mesh;

  // For t > top > s: (t-s)^{alpha-1} = t^{alpha-1} sum_m c_m (s/t)^m.
  constexpr int terms = 16;
  std::vector<double> c(terms);
  c[0] = 1.0;
  for (int m = 1; m < terms; ++m) c[m] = c[m - 1] * (m - alpha) / m;
  const auto rows = phi.values.rows();
  Mat mphi = Mat::Zero(rows, terms), mpsi = Mat::Zero(rows, terms);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = phi.grid.node(k), hi = phi.grid.node(k + 1);
    for (int m = 0; m < terms; ++m) {
      const double mass = (std::pow(hi, m + 1) - std::pow(lo, m + 1)) / (m + 1);
      mphi.col(m) += mass * phi.values.col(static_cast<Eigen::Index>(k));
      mpsi.col(m) += mass * psi.values.col(static_cast<Eigen::Index>(k));
    }
  }
  const double g2 = std::tgamma(alpha) * std::tgamma(alpha);
  double tail = 0.0;
  for (int m = 0; m < terms; ++m) {
    for (int l = 0; l < terms; ++l) {
      const double e = m + l + 1 - 2.0 * alpha;
      tail += c[m] * c[l] * mphi.col(m).dot(mpsi.col(l)) * std::pow(top, -e) / e;
    }
  }
  tail /= g2;

  const double rho = span / top;
  const double sphi = phi.values.cwiseAbs().maxCoeff();
  const double spsi = psi.values.cwiseAbs().maxCoeff();
  const double rest = 2.0 * sphi * spsi * span * span * std::pow(top, 2.0 * alpha - 1.0) *
                      std::pow(rho, terms) / ((1.0 - rho) * (1.0 - rho) * (terms + 1 - 2.0 * alpha)) /
                      g2;
  return {body + tail, tail, rest, top};
}

double h_inner_frac(const SampledPath& phi, const SampledPath& psi, Hurst h, double horizon,
                    Exec exec) {
  return h_inner_frac_report(phi, psi, h, horizon, exec).value;
}

NormBoundReport h_norm_lower_bound(const SampledPath& f, Hurst h, double gamma, Exec exec) {
  if (!(gamma > h.value() - 0.5) || !(gamma <= 1.0)) {
    throw DomainError("h_norm_lower_bound: gamma must lie in (H - 1/2, 1]");
  }
  NormBoundReport rep;
  rep.sup = holder::sup_norm(f);
  rep.h_norm = std::sqrt(std::max(0.0, h_inner_kernel(f, f, h, exec)));
  rep.gamma_norm = holder::holder_norm(f, gamma, exec) + rep.sup;
  if (rep.sup == 0.0) {
    rep.zero_path = true;
    rep.ratio = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.ratio = rep.h_norm * std::pow(rep.gamma_norm, 2.0 + 1.0 / gamma) /
              std::pow(rep.sup, 3.0 + 1.0 / gamma);
  return rep;
}

std::vector<std::pair<SampledPath, SampledPath>> pair_corpus(std::size_t n_steps, std::size_t pairs,
                                                             std::uint64_t seed) {
  if (n_steps < 2) throw DomainError("pair_corpus: need at least two steps");
  const TimeGrid grid(n_steps);
  std::vector<std::pair<SampledPath, SampledPath>> out;
  out.reserve(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    auto make = [&](std::size_t comp) {
      rng::Stream s(seed, "pair-corpus", p, comp);
      if (p % 2 == 0) {
        double a[3], c[3];
        for (int k = 0; k < 3; ++k) {
          a[k] = s.gaussian();
          c[k] = 2.0 * std::numbers::pi * s.uniform();
        }
        return SampledPath::from_function(grid, [&](double t) {
          double v = 0.0;
          for (int k = 0; k < 3; ++k) v += a[k] * std::sin((k + 1) * std::numbers::pi * t + c[k]);
          return v;
        });
      }
      std::size_t lo = static_cast<std::size_t>(s.uniform() * static_cast<double>(n_steps));
      std::size_t hi = static_cast<std::size_t>(s.uniform() * static_cast<double>(n_steps));
      if (lo > hi) std::swap(lo, hi);
      if (hi == lo) hi = std::min(n_steps, lo + 1), lo = hi - 1;
      Mat v = Mat::Zero(1, static_cast<Eigen::Index>(n_steps + 1));
      for (std::size_t k = lo; k < hi; ++k) v(0, static_cast<Eigen::Index>(k)) = 1.0;
      return SampledPath(grid, v);
    };
    out.emplace_back(make(0), make(1));
  }
  return out;
}

ReprhReport check_reprh(Hurst h, std::size_t n_steps, std::size_t pairs, std::uint64_t seed, Exec exec) {
  const auto corpus = pair_corpus(n_steps, pairs, seed);
  ReprhReport rep;
  rep.hurst = h;
  rep.n_steps = n_steps;
  rep.seed = seed;
  rep.rows.resize(corpus.size());
  for_each_index(exec, corpus.size(), [&](std::size_t i) {
    const auto& [phi, psi] = corpus[i];
    ReprhRow& row = rep.rows[i];
    row.kernel = h_inner_kernel(phi, psi, h, Exec::serial);
    row.frac = h_inner_frac(phi, psi, h, 8.0, Exec::serial);
    row.scale = std::sqrt(std::max(0.0, h_inner_kernel(phi, phi, h, Exec::serial)) *
                          std::max(0.0, h_inner_kernel(psi, psi, h, Exec::serial)));
    row.rel_error = std::abs(row.kernel - row.frac) / (row.scale + 1e-12);
  });
  for (const auto& r : rep.rows) rep.max_rel_error = std::max(rep.max_rel_error, r.rel_error);
  return rep;
}

}  // namespace hypofrac::frac
