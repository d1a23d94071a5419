#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rmcf/family.hpp"
#include "rmcf/immersion.hpp"

namespace rmcf {

struct FunctionalReport {
  double value = 0.0;
  std::vector<double> integrand;  // value = Σ integrand · measure_weight
  std::string quadrature = "periodic-trapezoid";
};

/// ∫ e^{−f} dμ
FunctionalReport weighted_volume(const CurveGeometry& geom);
/// ∫ |H + ∇f^⊥|² e^{−f} dμ
FunctionalReport shrinker_residual_integral(const CurveGeometry& geom);
/// ∫ e^{−f/2} dμ
FunctionalReport stone_functional(const CurveGeometry& geom);

using ScalarField = std::function<double(const Vec&)>;
using DensityField = std::function<ScalarJet(const Vec&)>;
using TensorField = std::function<Mat(const Vec&)>;

/// 𝓕(u, F, ρ, g) = ∫ u ρ(F) dμ(F*g), with dμ taken from `metric` at each vertex.
/// Throws DomainError when ρ ≤ 0 at a vertex.
FunctionalReport general_functional(const std::vector<double>& u, const DiscreteCurve& curve,
                                    const ScalarField& rho, const TensorField& metric,
                                    const Chart& chart);
FunctionalReport general_functional(const std::vector<double>& u, const DiscreteCurve& curve,
                                    const ScalarField& rho, const Geometry& g);

/// Direction (w, V, k, h): variations of u, F, ρ and g.
struct VariationData {
  std::vector<double> w;
  std::vector<Vec> V;
  ScalarField k;
  TensorField h;

  static VariationData zero(int n_vertices, int dim);
};

/// Right side of the first variation formula for 𝓕 in direction v, with
/// f = −log ρ − (n/2) log(4πτ). Throws ConfigError if a closure is missing.
double first_variation_rhs(const std::vector<double>& u, const DiscreteCurve& curve,
                           const Geometry& g, const DensityField& rho, const VariationData& v,
                           double tau);

/// (𝓕(p + εv) − 𝓕(p − εv)) / 2ε along u + εw, F + εV, ρ + εk, g + εh.
double finite_difference_variation(const std::vector<double>& u, const DiscreteCurve& curve,
                                   const Geometry& g, const ScalarField& rho,
                                   const VariationData& v, double eps);

/// A space-time path sample (x, t).
using PathSample = std::pair<Vec, double>;

/// ℒ(γ) = ∫ √(t₂ − t)(R(g_t) + |γ̇|²_{g_t}) dt over the family, with the √
/// weight integrated exactly against a piecewise-linear integrand.
/// Throws InputError for non-increasing times and DomainError when t₂ ≥ T.
double l_length(const std::vector<PathSample>& path, const RicciFlowFamily& family);
/// Same quadrature for a static metric (the trivial flow on flat space).
double l_length(const std::vector<PathSample>& path, const Geometry& static_metric);

/// |x − base|² / (4(t₂ − t₁)); throws DomainError unless t₁ < t₂.
double reduced_distance_gaussian(const Vec& base, double t2, const Vec& query, double t1);

}  // namespace rmcf
