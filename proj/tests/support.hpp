#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"

namespace testing_support {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;  // standard error of the mean
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  m.se = std::sqrt(m.var / static_cast<double>(x.size()));
  return m;
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  return sxy / sxx;
}

inline std::string config(const std::string& name) { return std::string(HYPOFRAC_CONFIG_DIR) + "/" + name + ".json"; }

}  // namespace testing_support
