#include "hypofrac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hypofrac::kernels {

double toeplitz_bilinear(std::span<const double> w, const Mat& phi, const Mat& psi, Exec exec) {
  const auto n = static_cast<std::size_t>(phi.cols());
  if (psi.cols() != phi.cols() || psi.rows() != phi.rows()) {
    throw DomainError("toeplitz_bilinear: operand shapes differ");
  }
  if (w.size() < n) throw DomainError("toeplitz_bilinear: weight table too short");
  const auto rows = phi.rows();
  std::vector<double> partial(n, 0.0);
  for_each_index(exec, n, [&](std::size_t j) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double pj = phi(r, static_cast<Eigen::Index>(j));
      if (pj == 0.0) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lag = j > k ? j - k : k - j;
        s += w[lag] * psi(r, static_cast<Eigen::Index>(k));
      }
      acc += pj * s;
    }
    partial[j] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

Mat toeplitz_apply(std::span<const double> w, const Mat& m, Exec exec) {
  const auto n = static_cast<std::size_t>(m.cols());
  if (w.size() < n) throw DomainError("toeplitz_apply: weight table too short");
  Mat out = Mat::Zero(m.rows(), m.cols());
  for_each_index(exec, n, [&](std::size_t u) {
    auto col = out.col(static_cast<Eigen::Index>(u));
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t lag = u > v ? u - v : v - u;
      col.noalias() += w[lag] * m.col(static_cast<Eigen::Index>(v));
    }
  });
  return out;
}

Mat lower_toeplitz_apply(std::span<const double> w, const Mat& x, std::size_t out_len, Exec exec) {
  if (w.size() < out_len) throw DomainError("lower_toeplitz_apply: weight table too short");
  const auto cols = static_cast<std::size_t>(x.cols());
  Mat out = Mat::Zero(x.rows(), static_cast<Eigen::Index>(out_len));
  for_each_index(exec, out_len, [&](std::size_t i) {
    auto col = out.col(static_cast<Eigen::Index>(i));
    const std::size_t upto = std::min(i, cols);
    for (std::size_t k = 0; k < upto; ++k) {
      col.noalias() += w[i - k] * x.col(static_cast<Eigen::Index>(k));
    }
  });
  return out;
}

double holder_seminorm(const Mat& values, double mesh, double alpha, Exec exec) {
  const auto n = static_cast<std::size_t>(values.cols());
  if (n < 2) throw DomainError("holder_seminorm: need at least two nodes");
  std::vector<double> lag_scale(n);
  for (std::size_t m = 1; m < n; ++m) {
    lag_scale[m] = 1.0 / std::pow(static_cast<double>(m) * mesh, alpha);
  }
  std::vector<double> best(n, 0.0);
  for_each_index(exec, n - 1, [&](std::size_t i) {
    double b = 0.0;
    const auto vi = values.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double inc = (values.col(static_cast<Eigen::Index>(j)) - vi).norm();
      b = std::max(b, inc * lag_scale[j - i]);
    }
    best[i] = b;
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace hypofrac::kernels
