#pragma once

#include <vector>

#include "rmcf/curve.hpp"

namespace rmcf {

/// Per-vertex extrinsic geometry of a closed curve in (chart, g, f).
struct CurveGeometry {
  int n_ambient = 0;
  std::vector<Vec> position;
  std::vector<Mat> metric;
  std::vector<Vec> tangent;       // ∂_u F
  std::vector<Vec> unit_tangent;  // e = ∂_u F / σ
  std::vector<double> speed;      // σ = |∂_u F|_g
  std::vector<std::vector<Vec>> normal_frame;
  std::vector<double> measure_weight;  // σ Δu
  std::vector<Vec> accel;              // ∇_{∂u} ∂_u F
  std::vector<Vec> H;
  std::vector<double> A_norm;
  std::vector<double> potential;  // f
  std::vector<Vec> grad_f;        // contravariant ∇f
  std::vector<Vec> grad_f_normal;
  std::vector<Vec> velocity_normalized;  // H + ∇f
  std::vector<Vec> shrinker_defect;      // H + ∇f^⊥

  int size() const { return static_cast<int>(position.size()); }
  double length() const;
  double max_A() const;
  double min_measure_weight() const;
};

/// Throws DomainError for vertices outside the chart and
/// DegenerateImmersionError when the tangent norm drops below 1e-12.
CurveGeometry compute_geometry(const DiscreteCurve& curve, const Geometry& geometry);

/// Velocity of one of the two flows plus the step-control statistics, without
/// the frame and projections compute_geometry fills in.
struct VelocitySample {
  std::vector<Vec> velocity;  // H, or H + ∇f when with_gradient is set
  double min_measure_weight = 0.0;
  double max_A = 0.0;
  double length = 0.0;
};

VelocitySample curve_velocity(const DiscreteCurve& curve, const Geometry& geometry, bool with_gradient);

/// v − g(v, e) e.
Vec normal_part(const Mat& g, const Vec& e, const Vec& v);

/// |H − λ∇f^⊥|_g per vertex.
std::vector<double> shrinker_residual_pointwise(const CurveGeometry& geom, double lambda);

/// Laplace–Beltrami (1/σ) ∂_u(∂_u φ / σ) of a vertex scalar along the curve.
std::vector<double> curve_laplacian(const CurveGeometry& geom, const std::vector<double>& phi);

}  // namespace rmcf
