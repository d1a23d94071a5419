#pragma once

#include <memory>

#include "rmcf/ambient.hpp"

namespace rmcf {

/// Value and chart partials of a scalar field at one point.
struct ScalarJet {
  double value = 0.0;
  Vec grad;  // ∂_a
  Mat hess;  // ∂_a ∂_b (not covariant)
};

/// g_t = (T − t) Φ_t* g̃, f_t = Φ_t* f̃, ρ_t = (4π(T − t))^{−n/2} e^{−f_t}.
/// Φ_t multiplies the soliton's scaled coordinates by √(T / (T − t)), so Φ_0 = id.
class RicciFlowFamily {
 public:
  RicciFlowFamily(std::shared_ptr<const AmbientSoliton> soliton, double horizon);

  const AmbientSoliton& soliton() const { return *soliton_; }
  const std::shared_ptr<const AmbientSoliton>& soliton_ptr() const { return soliton_; }
  double horizon() const { return horizon_; }
  int dim() const { return soliton_->dim(); }

  /// T − t; throws DomainError unless t < T.
  double tau(double t) const;
  /// Per-coordinate factor of Φ_t (1 on unscaled coordinates).
  Vec phi_scale(double t) const;

  Vec phi_at(const Vec& x, double t) const;
  Vec phi_inverse(const Vec& y, double t) const;
  Mat metric_at(const Vec& x, double t) const;
  double potential_at(const Vec& x, double t) const;
  double density_at(const Vec& x, double t) const;
  ScalarJet density_jet(const Vec& x, double t) const;

  /// Metric jet of g_t with potential f_t.
  MetricJet jet(const Vec& x, double t, int order) const;

  /// Frozen time slice (g_t, f_t) as a Geometry.
  std::shared_ptr<const Geometry> slice(double t) const;

 private:
  std::shared_ptr<const AmbientSoliton> soliton_;
  double horizon_;
};

struct FamilyResiduals {
  double soliton_equation = 0.0;  // max |Ric(g_t) + Hess f_t − g_t / (2τ)|
  double normalization = 0.0;     // |R(g_t) + |∇f_t|² − f_t / τ|
  double ricci_flow = 0.0;        // max |∂_t g_t + 2 Ric(g_t)|
  double conjugate_heat = 0.0;    // |∂_t ρ_t + Δ ρ_t − R ρ_t|
};

/// Time derivatives use a five-point stencil of spacing eps; requires t + 2·eps < T.
FamilyResiduals family_residuals(const RicciFlowFamily& family, const Vec& x, double t, double eps);

/// Δ_g of a scalar jet: g^{ab}(∂_a∂_b φ − Γ^c_{ab} ∂_c φ).
double laplacian(const Mat& g_inv, const Christoffel& gamma, const ScalarJet& phi);

}  // namespace rmcf
