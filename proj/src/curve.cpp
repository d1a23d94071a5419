#include "rmcf/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "rmcf/errors.hpp"

namespace rmcf {

DiscreteCurve::DiscreteCurve(std::vector<Vec> vertices) : vertices_(std::move(vertices)) {
  if (size() < kMinVertices)
    throw ConfigError("a curve needs at least " + std::to_string(kMinVertices) + " vertices");
  for (const auto& v : vertices_)
    if (v.size() != vertices_[0].size()) throw ConfigError("vertices of mixed dimension");
}

namespace {

template <class T, class Diff>
std::vector<T> stencil_d1(const std::vector<T>& f, double du, Diff diff) {
  const int n = static_cast<int>(f.size());
  std::vector<T> out(n);
  for (int i = 0; i < n; ++i) {
    const auto& c = f[i];
    const T p1 = diff(c, f[(i + 1) % n]);
    const T m1 = diff(c, f[(i + n - 1) % n]);
    const T p2 = diff(c, f[(i + 2) % n]);
    const T m2 = diff(c, f[(i + n - 2) % n]);
    out[i] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * du);
  }
  return out;
}

}  // namespace

std::vector<double> periodic_d1(const std::vector<double>& f, double du) {
  return stencil_d1(f, du, [](double a, double b) { return b - a; });
}

std::vector<Vec> periodic_d1(const std::vector<Vec>& f, double du) {
  return stencil_d1(f, du, [](const Vec& a, const Vec& b) -> Vec { return b - a; });
}

std::vector<double> periodic_d2(const std::vector<double>& f, double du) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double p1 = f[(i + 1) % n] - f[i], m1 = f[(i + n - 1) % n] - f[i];
    const double p2 = f[(i + 2) % n] - f[i], m2 = f[(i + n - 2) % n] - f[i];
    out[i] = (16.0 * (p1 + m1) - (p2 + m2)) / (12.0 * du * du);
  }
  return out;
}

void curve_derivatives(const DiscreteCurve& curve, const Chart& chart, std::vector<Vec>& d1,
                       std::vector<Vec>& d2) {
  const int n = curve.size();
  const double du = curve.du();
  d1.assign(n, Vec());
  d2.assign(n, Vec());
  for (int i = 0; i < n; ++i) {
    const Vec& c = curve[i];
    const Vec p1 = chart.delta(c, curve[i + 1]);
    const Vec m1 = chart.delta(c, curve[i - 1]);
    const Vec p2 = chart.delta(c, curve[i + 2]);
    const Vec m2 = chart.delta(c, curve[i - 2]);
    d1[i] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * du);
    d2[i] = (16.0 * (p1 + m1) - (p2 + m2)) / (12.0 * du * du);
  }
}

DiscreteCurve circle_curve(const Vec& center, double radius, int n_vertices, double warp) {
  if (center.size() < 2) throw ConfigError("circle needs at least two coordinates");
  if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
  if (warp < 0.0 || warp >= 1.0) throw ConfigError("circle warp must lie in [0, 1)");
  std::vector<Vec> pts;
  for (int i = 0; i < n_vertices; ++i) {
    const double v = 2.0 * std::numbers::pi * i / n_vertices;
    const double a = v + warp * std::sin(v);
    Vec p = center;
    p(0) += radius * std::cos(a);
    p(1) += radius * std::sin(a);
    pts.push_back(p);
  }
  return DiscreteCurve(std::move(pts));
}

DiscreteCurve ellipse_curve(const Vec& center, double a, double b, int n_vertices) {
  if (center.size() < 2) throw ConfigError("ellipse needs at least two coordinates");
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("ellipse axes must be positive");
  std::vector<Vec> pts;
  for (int i = 0; i < n_vertices; ++i) {
    const double v = 2.0 * std::numbers::pi * i / n_vertices;
    Vec p = center;
    p(0) += a * std::cos(v);
    p(1) += b * std::sin(v);
    pts.push_back(p);
  }
  return DiscreteCurve(std::move(pts));
}

DiscreteCurve latitude_curve(const AmbientSoliton& soliton, double theta0, int n_vertices,
                             const std::string& axis, double height, double tilt) {
  if (soliton.name() != "sphere" && soliton.name() != "cylinder")
    throw ConfigError("latitude curves need a sphere factor");
  if (!(theta0 > 0.0 && theta0 < std::numbers::pi)) throw ConfigError("theta0 must lie in (0, pi)");
  if (axis != "z" && axis != "x") throw ConfigError("latitude axis must be z or x");
  const bool cyl = soliton.name() == "cylinder";
  std::vector<Vec> pts;
  double prev_phi = 0.0;
  for (int i = 0; i < n_vertices; ++i) {
    const double psi = 2.0 * std::numbers::pi * i / n_vertices;
    double theta, phi;
    if (axis == "z") {
      theta = theta0;
      phi = psi;
    } else {
      const double px = std::cos(theta0);
      const double py = std::sin(theta0) * std::cos(psi);
      const double pz = std::sin(theta0) * std::sin(psi);
      theta = std::acos(std::clamp(pz, -1.0, 1.0));
      phi = std::atan2(py, px);
      if (i > 0) phi -= 2.0 * std::numbers::pi * std::round((phi - prev_phi) / (2.0 * std::numbers::pi));
    }
    prev_phi = phi;
    Vec p(cyl ? 3 : 2);
    p(0) = theta;
    p(1) = phi;
    if (cyl) p(2) = height + tilt * std::cos(psi);
    soliton.require_inside(p);
    pts.push_back(p);
  }
  return DiscreteCurve(std::move(pts));
}

namespace {

// Gauss–Legendre nodes and weights on [0, 1].
constexpr int kGauss = 8;
constexpr std::array<double, kGauss> kGaussX = {
    0.019855071751231856, 0.10166676129318664, 0.2372337950418355, 0.4082826787521751,
    0.5917173212478249,   0.7627662049581645,  0.8983332387068134, 0.9801449282487681};
constexpr std::array<double, kGauss> kGaussW = {
    0.050614268145188129, 0.11119051722668724, 0.15685332293894364, 0.18134189168918099,
    0.18134189168918099,  0.15685332293894364, 0.11119051722668724, 0.050614268145188129};

/// Trigonometric interpolant of the vertices in u ∈ [0, 1). Periodic
/// coordinates are unwrapped and their winding is carried as a linear term.
class PeriodicInterpolant {
 public:
  PeriodicInterpolant(const DiscreteCurve& curve, const Chart& chart)
      : n_(curve.size()), dim_(curve.dim()) {
    std::vector<Vec> y(n_ + 1);
    y[0] = curve[0];
    for (int i = 1; i <= n_; ++i) y[i] = y[i - 1] + chart.delta(curve[i - 1], curve[i]);
    winding_ = y[n_] - y[0];
    modes_ = (n_ - 1) / 2;
    nyquist_ = n_ % 2 == 0;
    a0_ = Vec::Zero(dim_);
    an_ = Vec::Zero(dim_);
    a_.assign(modes_ + 1, Vec::Zero(dim_));
    b_.assign(modes_ + 1, Vec::Zero(dim_));
    for (int j = 0; j < n_; ++j) {
      const Vec z = y[j] - winding_ * (static_cast<double>(j) / n_);
      a0_ += z / n_;
      if (nyquist_) an_ += (j % 2 == 0 ? 1.0 : -1.0) * z / n_;
      for (int k = 1; k <= modes_; ++k) {
        const double arg = 2.0 * std::numbers::pi * ((static_cast<long long>(k) * j) % n_) / n_;
        a_[k] += (2.0 / n_) * std::cos(arg) * z;
        b_[k] += (2.0 / n_) * std::sin(arg) * z;
      }
    }
  }

  int intervals() const { return n_; }

  /// Position at parameter (i + t) / N.
  Vec point(int i, double t) const {
    const double u = (i + t) / n_;
    Vec p = a0_ + winding_ * u;
    const std::complex<double> step = std::polar(1.0, 2.0 * std::numbers::pi * u);
    std::complex<double> w = 1.0;
    for (int k = 1; k <= modes_; ++k) {
      w *= step;
      p += w.real() * a_[k] + w.imag() * b_[k];
    }
    if (nyquist_) p += std::cos(std::numbers::pi * n_ * u) * an_;
    return p;
  }

  /// Derivative with respect to u.
  Vec velocity(int i, double t) const {
    const double u = (i + t) / n_;
    Vec v = winding_;
    const std::complex<double> step = std::polar(1.0, 2.0 * std::numbers::pi * u);
    std::complex<double> w = 1.0;
    for (int k = 1; k <= modes_; ++k) {
      w *= step;
      v += 2.0 * std::numbers::pi * k * (w.real() * b_[k] - w.imag() * a_[k]);
    }
    if (nyquist_) v -= std::numbers::pi * n_ * std::sin(std::numbers::pi * n_ * u) * an_;
    return v;
  }

  double speed(const Geometry& g, int i, double t) const {
    const Vec p = point(i, t);
    g.require_inside(p);
    return norm(g.jet(p, 0).g, velocity(i, t));
  }

  /// Length of interval i from its start up to local parameter t.
  double partial_length(const Geometry& g, int i, double t) const {
    double s = 0.0;
    for (int k = 0; k < kGauss; ++k) s += kGaussW[k] * speed(g, i, t * kGaussX[k]);
    return s * t / n_;
  }

 private:
  int n_, dim_, modes_;
  bool nyquist_;
  Vec winding_, a0_, an_;
  std::vector<Vec> a_, b_;
};

}  // namespace

double interpolated_length(const DiscreteCurve& curve, const Geometry& geometry) {
  const PeriodicInterpolant spline(curve, geometry.chart());
  double total = 0.0;
  for (int i = 0; i < spline.intervals(); ++i) total += spline.partial_length(geometry, i, 1.0);
  return total;
}

DiscreteCurve resample_by_arclength(const DiscreteCurve& curve, const Geometry& geometry, int n_new) {
  if (n_new < kMinVertices)
    throw ConfigError("resampling needs at least " + std::to_string(kMinVertices) + " vertices");
  const PeriodicInterpolant spline(curve, geometry.chart());
  const int n = spline.intervals();
  std::vector<double> cumulative(n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    cumulative[i + 1] = cumulative[i] + spline.partial_length(geometry, i, 1.0);
  const double total = cumulative[n];

  std::vector<Vec> out;
  out.reserve(n_new);
  out.push_back(curve[0]);
  int i = 0;
  for (int k = 1; k < n_new; ++k) {
    const double target = total * k / n_new;
    while (i < n - 1 && cumulative[i + 1] <= target) ++i;
    const double want = target - cumulative[i];
    const double seg = cumulative[i + 1] - cumulative[i];
    double lo = 0.0, hi = 1.0;
    double t = seg > 0.0 ? std::clamp(want / seg, 0.0, 1.0) : 0.0;
    for (int it = 0; it < 50; ++it) {
      const double r = spline.partial_length(geometry, i, t) - want;
      if (std::abs(r) <= 1e-15 * total) break;
      if (r > 0.0) hi = t; else lo = t;
      const double slope = spline.speed(geometry, i, t) / n;
      double next = slope > 0.0 ? t - r / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      t = next;
    }
    out.push_back(spline.point(i, t));
  }
  return DiscreteCurve(std::move(out));
}

}  // namespace rmcf
