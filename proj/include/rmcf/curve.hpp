#pragma once

#include <string>
#include <vector>

#include "rmcf/ambient.hpp"

namespace rmcf {

inline constexpr int kMinVertices = 16;

/// Closed polygon of N chart points at uniform parameter spacing 1/N.
/// Periodic coordinates may be stored unwrapped; all differences go through
/// Chart::delta.
class DiscreteCurve {
 public:
  DiscreteCurve() = default;
  /// Throws ConfigError when fewer than kMinVertices points are given.
  explicit DiscreteCurve(std::vector<Vec> vertices);

  int size() const { return static_cast<int>(vertices_.size()); }
  int dim() const { return vertices_.empty() ? 0 : static_cast<int>(vertices_[0].size()); }
  double du() const { return 1.0 / size(); }
  const Vec& operator[](int i) const { return vertices_[wrap(i)]; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  int wrap(int i) const {
    const int n = size();
    return ((i % n) + n) % n;
  }

 private:
  std::vector<Vec> vertices_;
};

// Periodic fourth-order central differences in the parameter u.
std::vector<double> periodic_d1(const std::vector<double>& f, double du);
std::vector<double> periodic_d2(const std::vector<double>& f, double du);
std::vector<Vec> periodic_d1(const std::vector<Vec>& f, double du);

/// First and second parameter derivatives of the vertex positions.
void curve_derivatives(const DiscreteCurve& curve, const Chart& chart, std::vector<Vec>& d1,
                       std::vector<Vec>& d2);

/// Circle in the (x1, x2) coordinate plane of a flat chart. `warp` in [0, 1)
/// clusters the parametrization: vertex i sits at angle 2πv + warp·sin(2πv), v = i/N.
DiscreteCurve circle_curve(const Vec& center, double radius, int n_vertices, double warp = 0.0);
DiscreteCurve ellipse_curve(const Vec& center, double a, double b, int n_vertices);

/// Latitude at angular distance theta0 from the chosen axis of the sphere factor.
/// axis "z" is the chart pole axis, "x" passes through (θ, φ) = (π/2, 0).
/// On the cylinder the line coordinate is height + tilt·cos(ψ).
DiscreteCurve latitude_curve(const AmbientSoliton& soliton, double theta0, int n_vertices,
                             const std::string& axis = "z", double height = 0.0,
                             double tilt = 0.0);

/// g-length of the trigonometric interpolant through the vertices.
double interpolated_length(const DiscreteCurve& curve, const Geometry& geometry);

/// Resample to n_new points equidistributed in g-arclength along the
/// trigonometric interpolant, keeping vertex 0 fixed.
DiscreteCurve resample_by_arclength(const DiscreteCurve& curve, const Geometry& geometry, int n_new);

}  // namespace rmcf
