#include "rmcf/chart.hpp"

#include <cmath>

namespace rmcf {

Chart::Chart(std::vector<Coordinate> coords) : coords_(std::move(coords)) {}

bool Chart::has_periodic() const {
  for (const auto& c : coords_)
    if (c.kind == CoordinateKind::kPeriodic) return true;
  return false;
}

bool Chart::contains(const Vec& x) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!std::isfinite(x(i))) return false;
    const auto& c = coords_[i];
    switch (c.kind) {
      case CoordinateKind::kLine:
        break;
      case CoordinateKind::kInterval:
        if (x(i) < c.lo || x(i) > c.hi) return false;
        break;
      case CoordinateKind::kPeriodic:
        break;
    }
  }
  return true;
}

Vec Chart::delta(const Vec& from, const Vec& to) const {
  Vec d = to - from;
  for (int i = 0; i < dim(); ++i) {
    const auto& c = coords_[i];
    if (c.kind != CoordinateKind::kPeriodic) continue;
    const double period = c.hi - c.lo;
    d(i) -= period * std::round(d(i) / period);
  }
  return d;
}

Vec Chart::canonical(const Vec& x) const {
  Vec y = x;
  for (int i = 0; i < dim(); ++i) {
    const auto& c = coords_[i];
    if (c.kind != CoordinateKind::kPeriodic) continue;
    const double period = c.hi - c.lo;
    y(i) = c.lo + (x(i) - c.lo) - period * std::floor((x(i) - c.lo) / period);
  }
  return y;
}

}  // namespace rmcf
