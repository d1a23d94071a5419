#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "rmcf/curve.hpp"
#include "rmcf/family.hpp"

namespace testing {

inline const double kPi = std::acos(-1.0);
inline const double kSqrt2 = std::sqrt(2.0);

inline rmcf::Vec vec(std::initializer_list<double> xs) {
  rmcf::Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline rmcf::Vec origin(int n = 2) { return rmcf::Vec::Zero(n); }

/// Mean and max deviation of the Euclidean distance from `center`.
inline std::pair<double, double> radius_stats(const rmcf::DiscreteCurve& c, const rmcf::Vec& center) {
  double sum = 0.0, lo = 1e300, hi = -1e300;
  for (const auto& v : c.vertices()) {
    const double r = (v - center).norm();
    sum += r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {sum / c.size(), hi - lo};
}

inline std::string scenario(const std::string& name) {
  return std::string(RMCF_SCENARIO_DIR) + "/" + name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rmcf_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
