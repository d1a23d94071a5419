#include "rmcf/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmcf/errors.hpp"

namespace rmcf {

double CurveGeometry::length() const {
  double s = 0.0;
  for (double w : measure_weight) s += w;
  return s;
}

double CurveGeometry::max_A() const {
  double m = 0.0;
  for (double a : A_norm) m = std::max(m, a);
  return m;
}

double CurveGeometry::min_measure_weight() const {
  return *std::min_element(measure_weight.begin(), measure_weight.end());
}

Vec normal_part(const Mat& g, const Vec& e, const Vec& v) { return v - inner(g, v, e) * e; }

namespace {

std::vector<Vec> normal_frame(const Mat& g, const Vec& e) {
  const int n = static_cast<int>(g.rows());
  std::vector<Vec> basis{e};
  std::vector<Vec> frame;
  for (int k = 0; k < n && static_cast<int>(frame.size()) < n - 1; ++k) {
    const Vec b = Vec::Unit(n, k);
    Vec w = b;
    for (const auto& q : basis) w -= inner(g, w, q) * q;
    const double ratio = norm(g, w) / norm(g, b);
    const double collinearity = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
    if (collinearity > 1.0 - 1e-8) continue;
    // Second pass keeps the frame orthonormal to roundoff.
    for (const auto& q : basis) w -= inner(g, w, q) * q;
    w /= norm(g, w);
    basis.push_back(w);
    frame.push_back(w);
  }
  return frame;
}

}  // namespace

CurveGeometry compute_geometry(const DiscreteCurve& curve, const Geometry& geometry) {
  const int n = curve.size();
  const int dim = geometry.dim();
  if (curve.dim() != dim) throw ConfigError("curve and ambient dimensions differ");
  for (const auto& v : curve.vertices()) geometry.require_inside(v);

  std::vector<Vec> d1, d2;
  curve_derivatives(curve, geometry.chart(), d1, d2);

  CurveGeometry out;
  out.n_ambient = dim;
  out.position = curve.vertices();
  out.metric.resize(n);
  out.tangent = d1;
  out.unit_tangent.resize(n);
  out.speed.resize(n);
  out.normal_frame.resize(n);
  out.measure_weight.resize(n);
  out.accel.resize(n);
  out.H.resize(n);
  out.A_norm.resize(n);
  out.potential.resize(n);
  out.grad_f.resize(n);
  out.grad_f_normal.resize(n);
  out.velocity_normalized.resize(n);
  out.shrinker_defect.resize(n);

  for (int i = 0; i < n; ++i) {
    const MetricJet j = geometry.jet(curve[i], 1);
    const Mat g_inv = inverse(j.g);
    const Christoffel gamma = christoffel(j, g_inv);
    const Vec& t = d1[i];
    const double sigma = norm(j.g, t);
    if (!(sigma >= 1e-12)) throw DegenerateImmersionError("curve tangent vanishes at a vertex");
    const Vec e = t / sigma;
    const Vec k = d2[i] + gamma.contract(t, t);
    const Vec h = normal_part(j.g, e, k) / (sigma * sigma);
    const Vec grad = mul(g_inv, j.df);
    const Vec grad_normal = normal_part(j.g, e, grad);

    out.metric[i] = j.g;
    out.unit_tangent[i] = e;
    out.speed[i] = sigma;
    out.normal_frame[i] = normal_frame(j.g, e);
    out.measure_weight[i] = sigma * curve.du();
    out.accel[i] = k;
    out.H[i] = h;
    out.A_norm[i] = norm(j.g, h);
    out.potential[i] = j.f;
    out.grad_f[i] = grad;
    out.grad_f_normal[i] = grad_normal;
    out.velocity_normalized[i] = h + grad;
    out.shrinker_defect[i] = h + grad_normal;
  }
  return out;
}

VelocitySample curve_velocity(const DiscreteCurve& curve, const Geometry& geometry,
                              bool with_gradient) {
  const int n = curve.size();
  std::vector<Vec> d1, d2;
  curve_derivatives(curve, geometry.chart(), d1, d2);
  VelocitySample out;
  out.velocity.resize(n);
  out.min_measure_weight = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    geometry.require_inside(curve[i]);
    const MetricJet j = geometry.jet(curve[i], 1);
    const Mat g_inv = inverse(j.g);
    const Vec& t = d1[i];
    const double sigma = norm(j.g, t);
    if (!(sigma >= 1e-12)) throw DegenerateImmersionError("curve tangent vanishes at a vertex");
    const Vec e = t / sigma;
    const Vec k = d2[i] + christoffel(j, g_inv).contract(t, t);
    Vec h = normal_part(j.g, e, k) / (sigma * sigma);
    out.max_A = std::max(out.max_A, norm(j.g, h));
    const double w = sigma * curve.du();
    out.min_measure_weight = std::min(out.min_measure_weight, w);
    out.length += w;
    if (with_gradient) h += mul(g_inv, j.df);
    out.velocity[i] = h;
  }
  return out;
}

std::vector<double> shrinker_residual_pointwise(const CurveGeometry& geom, double lambda) {
  std::vector<double> out(geom.size());
  for (int i = 0; i < geom.size(); ++i)
    out[i] = norm(geom.metric[i], geom.H[i] - lambda * geom.grad_f_normal[i]);
  return out;
}

std::vector<double> curve_laplacian(const CurveGeometry& geom, const std::vector<double>& phi) {
  const int n = geom.size();
  const double du = 1.0 / n;
  std::vector<double> flux = periodic_d1(phi, du);
  for (int i = 0; i < n; ++i) flux[i] /= geom.speed[i];
  std::vector<double> out = periodic_d1(flux, du);
  for (int i = 0; i < n; ++i) out[i] /= geom.speed[i];
  return out;
}

}  // namespace rmcf
