#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hypofrac {

inline constexpr const char* kVersion = "0.3.0";

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot complete (factorization failure,
/// blow-up, guard limits).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hurst index restricted to the open interval (1/2, 1).
class Hurst {
 public:
  explicit Hurst(double value);
  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_;
};

/// Uniform grid t_k = k * horizon / n_steps, k = 0..n_steps.
class TimeGrid {
 public:
  explicit TimeGrid(std::size_t n_steps, double horizon = 1.0);

  std::size_t steps() const noexcept { return n_steps_; }
  std::size_t nodes() const noexcept { return n_steps_ + 1; }
  double horizon() const noexcept { return horizon_; }
  double mesh() const noexcept { return horizon_ / static_cast<double>(n_steps_); }
  double node(std::size_t k) const noexcept {
    return horizon_ * static_cast<double>(k) / static_cast<double>(n_steps_);
  }

  bool operator==(const TimeGrid& other) const noexcept {
    return n_steps_ == other.n_steps_ && horizon_ == other.horizon_;
  }

 private:
  std::size_t n_steps_;
  double horizon_;
};

std::string format_double(double x);

}  // namespace hypofrac
