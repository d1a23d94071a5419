#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rmcf/errors.hpp"
#include "rmcf/flow.hpp"
#include "rmcf/functionals.hpp"

using namespace rmcf;
using testing::kPi;
using testing::kSqrt2;
using testing::origin;
using testing::vec;

namespace {

std::shared_ptr<const AmbientSoliton> soliton(const std::string& name) { return make_soliton(name, {}); }

CurveGeometry circle_geom(double r, int n = 256) {
  static auto g = soliton("gaussian");
  return compute_geometry(circle_curve(origin(), r, n), *g);
}

ScalarField potential_density(const AmbientSoliton& s) {
  return [&s](const Vec& x) { return std::exp(-s.potential_at(x)); };
}

}  // namespace

TEST_CASE("weighted volume closed forms") {
  // 2πr e^{−r²/4} on circles about the origin.
  CHECK(weighted_volume(circle_geom(kSqrt2)).value ==
        doctest::Approx(2 * kPi * kSqrt2 * std::exp(-0.5)).epsilon(1e-6));
  CHECK(weighted_volume(circle_geom(kSqrt2)).value == doctest::Approx(5.3894).epsilon(1e-3 / 5.3894));
  CHECK(weighted_volume(circle_geom(1e-4)).value < 1e-3);
  auto s = soliton("sphere");
  const CurveGeometry eq = compute_geometry(latitude_curve(*s, kPi / 2, 128), *s);
  // Length 2π√2 times e^{−1}: 3.268891.
  CHECK(weighted_volume(eq).value == doctest::Approx(3.268891).epsilon(1e-6));
}

TEST_CASE("shrinker residual integral closed forms") {
  CHECK(shrinker_residual_integral(circle_geom(kSqrt2)).value <= 1e-6);
  // |1/r − r/2|² · 2πr e^{−r²/4} at r = 2.
  CHECK(shrinker_residual_integral(circle_geom(2.0)).value ==
        doctest::Approx(0.25 * std::exp(-1.0) * 4 * kPi).epsilon(1e-6));
  CHECK(shrinker_residual_integral(circle_geom(2.0)).value == doctest::Approx(1.1557).epsilon(1e-3 / 1.1557));
  auto s = soliton("sphere");
  const CurveGeometry eq = compute_geometry(latitude_curve(*s, kPi / 2, 128), *s);
  CHECK(shrinker_residual_integral(eq).value <= 1e-8);
}

TEST_CASE("stone functional closed forms") {
  // 2πr e^{−r²/8}, maximal at r = 2.
  CHECK(stone_functional(circle_geom(2.0)).value == doctest::Approx(4 * kPi * std::exp(-0.5)).epsilon(1e-6));
  CHECK(stone_functional(circle_geom(2.0)).value == doctest::Approx(7.621889).epsilon(1e-6));
  CHECK(stone_functional(circle_geom(kSqrt2)).value == doctest::Approx(6.920241).epsilon(1e-6));
  CHECK(stone_functional(circle_geom(1e-4)).value < 1e-3);
  for (double r : {0.5, 1.0, 1.7, 2.3, 3.0})
    CHECK(stone_functional(circle_geom(r, 64)).value <= 4 * kPi * std::exp(-0.5) + 1e-9);
}

TEST_CASE("integrals match their integrands") {
  const CurveGeometry geom = compute_geometry(ellipse_curve(vec({0.3, 0}), 2.0, 1.0, 64), *soliton("gaussian"));
  for (const FunctionalReport& r :
       {weighted_volume(geom), shrinker_residual_integral(geom), stone_functional(geom)}) {
    double sum = 0.0;
    for (int i = 0; i < geom.size(); ++i) sum += r.integrand[i] * geom.measure_weight[i];
    CHECK(r.value == doctest::Approx(sum).epsilon(1e-15));
    CHECK(r.quadrature == "periodic-trapezoid");
  }
}

TEST_CASE("general functional examples") {
  auto g = soliton("gaussian");
  const DiscreteCurve c = circle_curve(origin(), kSqrt2, 256);
  const std::vector<double> ones(256, 1.0);
  CHECK(general_functional(ones, c, potential_density(*g), *g).value ==
        doctest::Approx(weighted_volume(compute_geometry(c, *g)).value).epsilon(1e-14));

  const DiscreteCurve c3 = circle_curve(origin(), 3.0, 256);
  CHECK(general_functional(ones, c3, [](const Vec&) { return 1.0; }, *g).value ==
        doctest::Approx(6 * kPi).epsilon(1e-6));

  // u = (4πτ)^{1/2}, ρ_0, g_0 with T = 1: (4π)^{−1/2} times the weighted volume.
  RicciFlowFamily fam(g, 1.0);
  const std::vector<double> u(256, std::sqrt(4 * kPi));
  const double value =
      general_functional(u, c, [&](const Vec& x) { return fam.density_at(x, 0.0); }, *fam.slice(0.0)).value;
  CHECK(value == doctest::Approx(2 * kPi * kSqrt2 * std::exp(-0.5) / std::sqrt(4 * kPi)).epsilon(1e-6));
  CHECK(value == doctest::Approx(1.5202).epsilon(1e-3 / 1.5202));

  CHECK_THROWS_AS(general_functional(ones, c, [](const Vec&) { return 0.0; }, *g), DomainError);
  CHECK_THROWS_AS(general_functional(std::vector<double>(10, 1.0), c, potential_density(*g), *g), ConfigError);
}

TEST_CASE("unnormalized functional equals the rescaled weighted volume") {
  for (const char* name : {"gaussian", "sphere", "cylinder"}) {
    auto s = soliton(name);
    auto fam = std::make_shared<RicciFlowFamily>(s, 1.3);
    const int n = s->dim();
    const DiscreteCurve c = std::string(name) == "gaussian" ? ellipse_curve(vec({0.2, -0.1}), 1.5, 0.7, 128)
                                                            : latitude_curve(*s, 1.1, 128, "x");
    for (double t : {0.0, 0.4, 0.9, 1.2}) {
      const double tau = fam->tau(t);
      const std::vector<double> u(c.size(), std::pow(4 * kPi * tau, 0.5 * (n - 1)));
      const double F =
          general_functional(u, c, [&](const Vec& x) { return fam->density_at(x, t); }, *fam->slice(t)).value;
      const FlowState rescaled = rescale_state(FlowState::unnormalized(c, fam, t));
      const double wv = weighted_volume(compute_geometry(rescaled.curve, *s)).value;
      CAPTURE(name);
      CAPTURE(t);
      CHECK(F == doctest::Approx(wv / std::sqrt(4 * kPi)).epsilon(1e-8));
    }
  }
}

TEST_CASE("first variation: zero and linear directions") {
  auto g = soliton("gaussian");
  const RicciFlowFamily fam(g, 1.0);
  const DiscreteCurve c = circle_curve(origin(), 2.0, 256);
  const std::vector<double> u(256, std::sqrt(4 * kPi));
  const ScalarField rho = [&](const Vec& x) { return fam.density_at(x, 0.0); };
  const DensityField rho_jet = [&](const Vec& x) { return fam.density_jet(x, 0.0); };
  const auto slice = fam.slice(0.0);

  const VariationData zero = VariationData::zero(256, 2);
  CHECK(finite_difference_variation(u, c, *slice, rho, zero, 1e-4) == 0.0);
  // The discrete integration-by-parts identity only holds to truncation error.
  CHECK(std::abs(first_variation_rhs(u, c, *slice, rho_jet, zero, 1.0)) <= 1e-6);

  // 𝓕 is linear in u and ρ, so these directions have closed-form derivatives.
  const CurveGeometry geom = compute_geometry(c, *slice);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  VariationData vw = VariationData::zero(256, 2);
  for (int i = 0; i < 256; ++i) vw.w[i] = std::sin(2 * kPi * i / 256.0) + 0.3 * normal(rng);
  double expected_w = 0.0;
  for (int i = 0; i < 256; ++i) expected_w += vw.w[i] * rho(c[i]) * geom.measure_weight[i];
  CHECK(finite_difference_variation(u, c, *slice, rho, vw, 1e-3) == doctest::Approx(expected_w).epsilon(1e-8).scale(1e-8));

  VariationData vk = VariationData::zero(256, 2);
  vk.k = [](const Vec& x) { return 0.01 * std::cos(x(0)) * std::exp(-x.squaredNorm()); };
  double expected_k = 0.0;
  for (int i = 0; i < 256; ++i) expected_k += u[i] * vk.k(c[i]) * geom.measure_weight[i];
  CHECK(finite_difference_variation(u, c, *slice, rho, vk, 1e-3) == doctest::Approx(expected_k).epsilon(1e-8).scale(1e-8));
  // The RHS is linear in the direction, so the k-term separates from the zero-direction remainder.
  const double rhs_zero = first_variation_rhs(u, c, *slice, rho_jet, zero, 1.0);
  CHECK(std::abs(first_variation_rhs(u, c, *slice, rho_jet, vk, 1.0) - rhs_zero - expected_k) <= 1e-12);

  // The RHS does not depend on the choice of τ.
  CHECK(first_variation_rhs(u, c, *slice, rho_jet, vk, 1.0) == first_variation_rhs(u, c, *slice, rho_jet, vk, 0.37));

  VariationData missing = VariationData::zero(256, 2);
  missing.h = nullptr;
  CHECK_THROWS_AS(first_variation_rhs(u, c, *slice, rho_jet, missing, 1.0), ConfigError);
  CHECK_THROWS_AS(first_variation_rhs(u, c, *slice, nullptr, zero, 1.0), ConfigError);
  CHECK_THROWS_AS(finite_difference_variation(u, c, *slice, rho, zero, 1e-2), ConfigError);
}

TEST_CASE("l-length examples") {
  auto g = soliton("gaussian");
  // The family needs T > t₂ = 1; its metric is then T times the chart metric.
  const RicciFlowFamily gauss(g, 2.0);
  std::vector<PathSample> still, segment, chart_segment;
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    still.push_back({vec({0.5, 0.5}), t});
    segment.push_back({vec({2.0 * t, 0.0}), t});
    chart_segment.push_back({vec({kSqrt2 * t, 0.0}), t});
  }
  CHECK(l_length(still, gauss) == 0.0);
  // ∫₀¹ √(1 − t) · 4 dt = 8/3.
  CHECK(l_length(chart_segment, gauss) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(l_length(segment, *g) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  // Static point on the shrinking sphere: R(g_t) = 1/(1 − t), so
  // ∫₀^½ √(½ − t)/(1 − t) dt = 2(a − a·atan(1)) with a = √½, about 0.303493.
  const RicciFlowFamily sphere(soliton("sphere"), 1.0);
  std::vector<PathSample> pole_path;
  for (int i = 0; i <= 400; ++i) pole_path.push_back({vec({1.0, 0.3}), 0.5 * i / 400.0});
  const double a = std::sqrt(0.5);
  CHECK(l_length(pole_path, sphere) == doctest::Approx(2 * (a - a * std::atan(1.0))).epsilon(1e-4));

  std::vector<PathSample> backwards{{vec({0, 0}), 0.5}, {vec({0, 0}), 0.2}};
  CHECK_THROWS_AS(l_length(backwards, gauss), InputError);
  std::vector<PathSample> past{{vec({0, 0}), 0.0}, {vec({0, 0}), 2.5}};
  CHECK_THROWS_AS(l_length(past, gauss), DomainError);
}

TEST_CASE("reduced distance in the gaussian flow") {
  CHECK(reduced_distance_gaussian(vec({0.4, 0.1}), 1.0, vec({0.4, 0.1}), 0.3) == 0.0);
  CHECK(reduced_distance_gaussian(vec({2, 0}), 1.0, vec({0, 0}), 0.0) == 1.0);
  // ℓ is bounded by ℒ(γ)/(2√(t₂ − t₁)) for the straight path: 4/3 ≥ 1.
  std::vector<PathSample> segment;
  for (int i = 0; i <= 100; ++i) segment.push_back({vec({2.0 * i / 100.0, 0.0}), i / 100.0});
  const double bound = l_length(segment, *soliton("gaussian")) / 2.0;
  CHECK(bound == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(reduced_distance_gaussian(vec({2, 0}), 1.0, vec({0, 0}), 0.0) <= bound);
  CHECK_THROWS_AS(reduced_distance_gaussian(vec({0, 0}), 1.0, vec({1, 0}), 1.0), DomainError);
}

TEST_CASE("quadrature converges at second order or better") {
  auto g = soliton("gaussian");
  // Fine reference: weighted volume of the ellipse via the exact parametrization.
  const int m = 20000;
  double exact = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = 2 * kPi * i / m;
    const double x = 2.0 * std::cos(t), y = std::sin(t);
    exact += std::exp(-(x * x + y * y) / 4) * std::hypot(2.0 * std::sin(t), std::cos(t));
  }
  exact *= 2 * kPi / m;
  std::vector<double> err;
  for (int n : {16, 32, 64}) err.push_back(std::abs(weighted_volume(compute_geometry(ellipse_curve(origin(), 2.0, 1.0, n), *g)).value - exact));
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("residual integral is nonnegative and vanishes only at shrinkers") {
  auto g = soliton("gaussian");
  for (double r : {0.5, 1.0, 1.3, 1.5, 2.0, 3.0}) {
    const CurveGeometry geom = circle_geom(r, 64);
    const double value = shrinker_residual_integral(geom).value;
    CHECK(value >= 0.0);
    double max_defect = 0.0;
    for (int i = 0; i < geom.size(); ++i) max_defect = std::max(max_defect, norm(geom.metric[i], geom.shrinker_defect[i]));
    CHECK((value <= 1e-10) == (max_defect <= 1e-5));
  }
  CHECK(shrinker_residual_integral(compute_geometry(ellipse_curve(origin(), 2.0, 1.0, 64), *g)).value > 0.0);
}
