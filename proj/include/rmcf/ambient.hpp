#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "rmcf/chart.hpp"
#include "rmcf/tensor.hpp"

namespace rmcf {

/// Metric and potential data at one chart point, with partial derivatives
/// up to the requested order. dg[k] = ∂_k g, ddg[k * kMaxDim + l] = ∂_k ∂_l g.
struct MetricJet {
  int order = 0;
  Mat g;
  std::array<Mat, kMaxDim> dg;
  std::array<Mat, kMaxDim * kMaxDim> ddg;
  double f = 0.0;
  Vec df;
  Mat ddf;

  int dim() const { return static_cast<int>(g.rows()); }
  const Mat& second(int k, int l) const { return ddg[k * kMaxDim + l]; }
  Mat& second(int k, int l) { return ddg[k * kMaxDim + l]; }
};

/// Zero-initialised jet of dimension n.
MetricJet make_jet(int n, int order);

/// Everything derived from a jet of order 2.
struct CurvatureData {
  Mat g_inv;
  Christoffel gamma;
  Tensor4 riemann;  // R_{abcd} = g(∂_a, Rm(∂_c, ∂_d) ∂_b)
  Mat ricci;        // R_{ac} = g^{bd} R_{abcd}
  double scalar = 0.0;
};

Christoffel christoffel(const MetricJet& jet, const Mat& g_inv);
CurvatureData curvature(const MetricJet& jet);

/// Contravariant gradient g^{ab} ∂_b f.
Vec potential_gradient(const MetricJet& jet, const Mat& g_inv);
/// Covariant Hessian ∂_a∂_b f − Γ^c_{ab} ∂_c f.
Mat potential_hessian(const MetricJet& jet, const Christoffel& gamma);

/// A Riemannian metric with a distinguished potential on a single global chart.
/// Implementations are immutable and safe to share between threads.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual int dim() const = 0;
  virtual const Chart& chart() const = 0;
  /// Analytic jet at x. Callers must ensure x lies in the chart.
  virtual MetricJet jet(const Vec& x, int order) const = 0;

  /// Throws DomainError when x lies outside the chart validity domain.
  void require_inside(const Vec& x) const;

  Mat metric_at(const Vec& x) const;
  Christoffel christoffel_at(const Vec& x) const;
  Tensor4 riemann_at(const Vec& x) const;
  Mat ricci_at(const Vec& x) const;
  double scalar_at(const Vec& x) const;
  double potential_at(const Vec& x) const;
  Vec potential_grad_at(const Vec& x) const;
  Mat potential_hess_at(const Vec& x) const;
};

/// Gradient shrinking Ricci soliton: Ric + Hess f − g/2 = 0 and R + |∇f|² − f = 0.
class AmbientSoliton : public Geometry {
 public:
  const std::string& name() const { return name_; }
  const Chart& chart() const override { return chart_; }
  int dim() const override { return chart_.dim(); }

  /// Coordinates on which the soliton's diffeomorphisms Φ_t act by scaling.
  /// Φ_t is the identity on all other coordinates.
  const std::vector<bool>& scaled_coordinates() const { return scaled_; }
  bool is_flat() const { return flat_; }

 protected:
  AmbientSoliton(std::string name, Chart chart, std::vector<bool> scaled, bool flat)
      : name_(std::move(name)), chart_(std::move(chart)), scaled_(std::move(scaled)), flat_(flat) {}

 private:
  std::string name_;
  Chart chart_;
  std::vector<bool> scaled_;
  bool flat_;
};

/// Angular distance kept from the sphere poles in spherical charts.
inline constexpr double kPoleMargin = 1e-3;

/// Builds "gaussian" (params: dim), "sphere" or "cylinder" (params: radius).
/// Throws ConfigError for unknown names, bad radii or unsupported dimensions.
std::shared_ptr<const AmbientSoliton> make_soliton(std::string_view name,
                                                   const std::map<std::string, double>& params);

/// (max |Ric + Hess f − g/2|, |R + |∇f|² − f|) at p.
std::pair<double, double> identity_residuals(const AmbientSoliton& soliton, const Vec& p);

/// e^{2λf/m} g̃ wrapped as a geometry; its potential is the soliton's.
class ConformalGeometry : public Geometry {
 public:
  ConformalGeometry(std::shared_ptr<const Geometry> base, double lambda, int m);
  int dim() const override { return base_->dim(); }
  const Chart& chart() const override { return base_->chart(); }
  MetricJet jet(const Vec& x, int order) const override;

 private:
  std::shared_ptr<const Geometry> base_;
  double lambda_;
  int m_;
};

Mat conformal_metric_at(const AmbientSoliton& soliton, double lambda, int m, const Vec& p);

}  // namespace rmcf
