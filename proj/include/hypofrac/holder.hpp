#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/fbm.hpp"
#include "hypofrac/parallel.hpp"

namespace hypofrac::holder {

/// Scalar or vector-valued samples on a uniform grid; column k is the value at t_k.
struct SampledPath {
  TimeGrid grid;
  Mat values;
  std::optional<double> regularity;

  SampledPath(TimeGrid g, Mat v, std::optional<double> reg = std::nullopt);

  static SampledPath from_function(const TimeGrid& g, const std::function<double(double)>& f,
                                   std::optional<double> reg = std::nullopt);
  /// All components of a driver path, declared regularity H.
  static SampledPath from_fbm(const fbm::FbmPath& path);
  /// One component of a driver path.
  static SampledPath component(const fbm::FbmPath& path, std::size_t i);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t nodes() const noexcept { return static_cast<std::size_t>(values.cols()); }
  double operator()(std::size_t k) const { return values(0, static_cast<Eigen::Index>(k)); }
};

/// Holder seminorm over all grid pairs (the value at 0 does not enter).
double holder_norm(const SampledPath& p, double alpha, Exec exec = default_exec());

/// max_k |p(t_k)|.
double sup_norm(const SampledPath& p);

/// Trapezoid rule for int_0^T |p(t)| dt.
double l1_norm(const SampledPath& p);

enum class Rule { left, trapezoid };

/// Running Riemann-Stieltjes integral t -> int_0^t <f, dg>. Both paths share
/// the grid and the dimension; the result is scalar.
SampledPath young_integral(const SampledPath& f, const SampledPath& g, Rule rule = Rule::left,
                           std::vector<std::string>* warnings = nullptr);

struct InterpolationReport {
  double lhs = 0.0;   // ||b||_inf
  double rhs = 0.0;   // gamma ||b||_H + gamma^{-1/H} ||b||_L1
  double ratio = 0.0;  // lhs / rhs, 0 when both vanish
};

InterpolationReport interpolation_check(const SampledPath& b, double gamma_weight,
                                        double holder_exp);

struct StepApproximation {
  SampledPath bar;   // b(Delta * floor(t / Delta))
  SampledPath beta;  // b - bar
};

/// 1/Delta must be an integer and Delta a multiple of the mesh.
StepApproximation step_approximation(const SampledPath& b, double delta_coarse);

}  // namespace hypofrac::holder
