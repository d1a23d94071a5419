#include "rmcf/family.hpp"

#include <cmath>
#include <numbers>

#include "rmcf/errors.hpp"

namespace rmcf {

RicciFlowFamily::RicciFlowFamily(std::shared_ptr<const AmbientSoliton> soliton, double horizon)
    : soliton_(std::move(soliton)), horizon_(horizon) {
  if (!soliton_) throw ConfigError("family needs a soliton");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ConfigError("horizon T must be positive");
}

double RicciFlowFamily::tau(double t) const {
  if (!(t < horizon_)) throw DomainError("time must stay below the horizon T");
  return horizon_ - t;
}

Vec RicciFlowFamily::phi_scale(double t) const {
  const double c = std::sqrt(horizon_ / tau(t));
  const auto& scaled = soliton_->scaled_coordinates();
  Vec s(dim());
  for (int i = 0; i < dim(); ++i) s(i) = scaled[i] ? c : 1.0;
  return s;
}

Vec RicciFlowFamily::phi_at(const Vec& x, double t) const {
  return x.cwiseProduct(phi_scale(t));
}

Vec RicciFlowFamily::phi_inverse(const Vec& y, double t) const {
  return y.cwiseQuotient(phi_scale(t));
}

MetricJet RicciFlowFamily::jet(const Vec& x, double t, int order) const {
  const double tt = tau(t);
  const Vec c = phi_scale(t);
  const MetricJet b = soliton_->jet(x.cwiseProduct(c), order);
  const int n = dim();
  // Pullback by a diagonal scaling: every covariant index picks up its factor.
  const Mat cc = c * c.transpose();
  MetricJet j = make_jet(n, order);
  j.g = tt * b.g.cwiseProduct(cc);
  j.f = b.f;
  j.df = b.df.cwiseProduct(c);
  j.ddf = b.ddf.cwiseProduct(cc);
  if (order >= 1)
    for (int k = 0; k < n; ++k) j.dg[k] = (tt * c(k)) * b.dg[k].cwiseProduct(cc);
  if (order >= 2)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) j.second(k, l) = (tt * c(k) * c(l)) * b.second(k, l).cwiseProduct(cc);
  return j;
}

Mat RicciFlowFamily::metric_at(const Vec& x, double t) const {
  soliton_->require_inside(x);
  return jet(x, t, 0).g;
}

double RicciFlowFamily::potential_at(const Vec& x, double t) const {
  soliton_->require_inside(x);
  return jet(x, t, 0).f;
}

double RicciFlowFamily::density_at(const Vec& x, double t) const {
  const double tt = tau(t);
  return std::pow(4.0 * std::numbers::pi * tt, -0.5 * dim()) * std::exp(-potential_at(x, t));
}

ScalarJet RicciFlowFamily::density_jet(const Vec& x, double t) const {
  soliton_->require_inside(x);
  const double tt = tau(t);
  const MetricJet j = jet(x, t, 1);
  ScalarJet out;
  out.value = std::pow(4.0 * std::numbers::pi * tt, -0.5 * dim()) * std::exp(-j.f);
  out.grad = -out.value * j.df;
  out.hess = out.value * (j.df * j.df.transpose() - j.ddf);
  return out;
}

namespace {

class FamilySlice final : public Geometry {
 public:
  FamilySlice(const RicciFlowFamily& family, double t) : family_(family), t_(t) {
    family_.tau(t);
  }
  int dim() const override { return family_.dim(); }
  const Chart& chart() const override { return family_.soliton().chart(); }
  MetricJet jet(const Vec& x, int order) const override { return family_.jet(x, t_, order); }

 private:
  RicciFlowFamily family_;
  double t_;
};

}  // namespace

std::shared_ptr<const Geometry> RicciFlowFamily::slice(double t) const {
  return std::make_shared<FamilySlice>(*this, t);
}

double laplacian(const Mat& g_inv, const Christoffel& gamma, const ScalarJet& phi) {
  const int n = static_cast<int>(g_inv.rows());
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double cov = phi.hess(a, b);
      for (int c = 0; c < n; ++c) cov -= gamma(c, a, b) * phi.grad(c);
      s += g_inv(a, b) * cov;
    }
  return s;
}

FamilyResiduals family_residuals(const RicciFlowFamily& family, const Vec& x, double t, double eps) {
  family.soliton().require_inside(x);
  const double tt = family.tau(t);
  family.tau(t + 2.0 * eps);
  FamilyResiduals r;

  const MetricJet j = family.jet(x, t, 2);
  const CurvatureData cd = curvature(j);
  const Mat hess = potential_hessian(j, cd.gamma);
  r.soliton_equation = (cd.ricci + hess - j.g / (2.0 * tt)).cwiseAbs().maxCoeff();
  const Vec grad = potential_gradient(j, cd.g_inv);
  r.normalization = std::abs(cd.scalar + inner(j.g, grad, grad) - j.f / tt);

  // Five-point central differences in t.
  auto d_dt = [&](auto&& at) {
    return (at(t - 2.0 * eps) - 8.0 * at(t - eps) + 8.0 * at(t + eps) - at(t + 2.0 * eps)) / (12.0 * eps);
  };
  const Mat dg = d_dt([&](double s) -> Mat { return family.jet(x, s, 0).g; });
  r.ricci_flow = (dg + 2.0 * cd.ricci).cwiseAbs().maxCoeff();

  const ScalarJet rho = family.density_jet(x, t);
  const double drho = d_dt([&](double s) { return family.density_at(x, s); });
  r.conjugate_heat = std::abs(drho + laplacian(cd.g_inv, cd.gamma, rho) - cd.scalar * rho.value);
  return r;
}

}  // namespace rmcf
