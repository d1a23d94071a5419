#pragma once

#include <string>
#include <vector>

#include "rmcf/tensor.hpp"

namespace rmcf {

enum class CoordinateKind { kLine, kInterval, kPeriodic };

/// One chart coordinate. Intervals are closed validity domains; periodic
/// coordinates wrap with period hi - lo and never leave the chart.
struct Coordinate {
  std::string name;
  CoordinateKind kind = CoordinateKind::kLine;
  double lo = 0.0;
  double hi = 0.0;
};

class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<Coordinate> coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Coordinate& coordinate(int i) const { return coords_[i]; }
  bool has_periodic() const;

  bool contains(const Vec& x) const;

  /// to - from, with periodic components reduced to the shortest representative.
  Vec delta(const Vec& from, const Vec& to) const;

  /// Reduce periodic components into [lo, hi).
  Vec canonical(const Vec& x) const;

 private:
  std::vector<Coordinate> coords_;
};

}  // namespace rmcf
