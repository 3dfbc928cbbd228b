#include "hypofrac/common.hpp"

#include <cmath>
#include <charconv>

namespace hypofrac {

Hurst::Hurst(double value) : value_(value) {
  if (!(value > 0.5 && value < 1.0)) {
    throw DomainError("hurst parameter must lie in the open interval (1/2, 1), got " +
                      format_double(value));
  }
}

TimeGrid::TimeGrid(std::size_t n_steps, double horizon) : n_steps_(n_steps), horizon_(horizon) {
  if (n_steps == 0) throw DomainError("time grid needs at least one step");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("time grid horizon must be positive and finite");
  }
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace hypofrac
