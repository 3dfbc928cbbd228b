#include "hypofrac/holder.hpp"

#include <cmath>

#include "hypofrac/kernels.hpp"

namespace hypofrac::holder {

SampledPath::SampledPath(TimeGrid g, Mat v, std::optional<double> reg)
    : grid(g), values(std::move(v)), regularity(reg) {
  if (static_cast<std::size_t>(values.cols()) != grid.nodes()) {
    throw DomainError("sampled path needs exactly n_steps + 1 values");
  }
}

SampledPath SampledPath::from_function(const TimeGrid& g, const std::function<double(double)>& f,
                                       std::optional<double> reg) {
  Mat v(1, static_cast<Eigen::Index>(g.nodes()));
  for (std::size_t k = 0; k < g.nodes(); ++k) v(0, static_cast<Eigen::Index>(k)) = f(g.node(k));
  return SampledPath(g, std::move(v), reg);
}

SampledPath SampledPath::from_fbm(const fbm::FbmPath& path) {
  return SampledPath(path.grid, path.values, path.hurst.value());
}

SampledPath SampledPath::component(const fbm::FbmPath& path, std::size_t i) {
  return SampledPath(path.grid, path.values.row(static_cast<Eigen::Index>(i)), path.hurst.value());
}

double holder_norm(const SampledPath& p, double alpha, Exec exec) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("holder_norm: alpha must lie in (0, 1]");
  return kernels::holder_seminorm(p.values, p.grid.mesh(), alpha, exec);
}

double sup_norm(const SampledPath& p) {
  return p.values.colwise().norm().maxCoeff();
}

double l1_norm(const SampledPath& p) {
  const Vec mags = p.values.colwise().norm().transpose();
  const auto n = mags.size();
  double s = 0.5 * (mags[0] + mags[n - 1]);
  for (Eigen::Index k = 1; k + 1 < n; ++k) s += mags[k];
  return s * p.grid.mesh();
}

SampledPath young_integral(const SampledPath& f, const SampledPath& g, Rule rule,
                           std::vector<std::string>* warnings) {
  if (!(f.grid == g.grid)) throw DomainError("young_integral: grid mismatch");
  if (f.dim() != g.dim()) throw DomainError("young_integral: dimension mismatch");
  if (warnings && f.regularity && g.regularity && *f.regularity + *g.regularity <= 1.0) {
    warnings->push_back("young_integral: declared regularities sum to " +
                        format_double(*f.regularity + *g.regularity) + " <= 1");
  }
  const auto n = static_cast<Eigen::Index>(f.nodes());
  Mat out = Mat::Zero(1, n);
  double acc = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Vec dg = g.values.col(k + 1) - g.values.col(k);
    if (rule == Rule::left) {
      acc += f.values.col(k).dot(dg);
    } else {
      acc += 0.5 * (f.values.col(k) + f.values.col(k + 1)).dot(dg);
    }
    out(0, k + 1) = acc;
  }
  std::optional<double> reg;
  if (f.regularity && g.regularity) reg = std::min(*f.regularity, *g.regularity);
  return SampledPath(f.grid, std::move(out), reg);
}

InterpolationReport interpolation_check(const SampledPath& b, double gamma_weight,
                                        double holder_exp) {
  if (!(gamma_weight > 0.0 && gamma_weight <= 1.0)) {
    throw DomainError("interpolation_check: gamma weight must lie in (0, 1]");
  }
  InterpolationReport rep;
  rep.lhs = sup_norm(b);
  rep.rhs = gamma_weight * holder_norm(b, holder_exp) +
            std::pow(gamma_weight, -1.0 / holder_exp) * l1_norm(b);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

StepApproximation step_approximation(const SampledPath& b, double delta_coarse) {
  const double inv = 1.0 / delta_coarse;
  const double blocks = std::round(inv);
  if (!(delta_coarse > 0.0) || std::abs(inv - blocks) > 1e-9 * inv) {
    throw DomainError("step_approximation: 1/Delta must be an integer");
  }
  const double ratio = delta_coarse / b.grid.mesh();
  const double stride_d = std::round(ratio);
  if (stride_d < 1.0 || std::abs(ratio - stride_d) > 1e-9 * ratio) {
    throw DomainError("step_approximation: Delta must be a multiple of the mesh");
  }
  const auto stride = static_cast<Eigen::Index>(stride_d);
  Mat bar = b.values;
  for (Eigen::Index k = 0; k < bar.cols(); ++k) bar.col(k) = b.values.col((k / stride) * stride);
  Mat beta = b.values - bar;
  return {SampledPath(b.grid, std::move(bar), b.regularity),
          SampledPath(b.grid, std::move(beta), b.regularity)};
}

}  // namespace hypofrac::holder
