#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "rmcf/errors.hpp"
#include "rmcf/flow.hpp"

using namespace rmcf;
using testing::kPi;
using testing::kSqrt2;
using testing::origin;
using testing::radius_stats;
using testing::vec;

namespace {

std::shared_ptr<const RicciFlowFamily> family(const std::string& name, double T = 1.0) {
  return std::make_shared<RicciFlowFamily>(make_soliton(name, {}), T);
}

}  // namespace

TEST_CASE("shrinking circle reaches radius 1 at t = 0.5") {
  // r' = −1/r, so r(t) = √(2 − 2t).
  FlowState st = FlowState::unnormalized(circle_curve(origin(), kSqrt2, 128), family("gaussian"));
  FlowSettings settings;
  for (int k = 1; k <= 500; ++k) st = advance_to(st, k * 1e-3, settings);
  CHECK(st.clock == 0.5);
  const auto [mean, spread] = radius_stats(st.curve, origin());
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(spread <= 1e-4);
}

TEST_CASE("equator is stationary under the normalized flow") {
  auto fam = family("sphere");
  const DiscreteCurve eq = latitude_curve(fam->soliton(), kPi / 2, 64);
  FlowState st = FlowState::normalized(eq, fam, 0.0);
  FlowSettings settings;
  for (int k = 0; k < 10000; ++k) st = step(st, 1e-3, settings);
  CHECK(st.step_count == 10000);
  double drift = 0.0;
  for (int i = 0; i < eq.size(); ++i)
    drift = std::max(drift, fam->soliton().chart().delta(eq[i], st.curve[i]).norm());
  CHECK(drift <= 1e-6);
}

TEST_CASE("root-two circle is stationary under the normalized flow") {
  FlowState st = FlowState::normalized(circle_curve(origin(), kSqrt2, 128), family("gaussian"), 0.0);
  FlowSettings settings;
  for (int k = 1; k <= 100; ++k) {
    st = advance_to(st, k * 0.01, settings);
    const auto [mean, spread] = radius_stats(st.curve, origin());
    CHECK(std::abs(mean - kSqrt2) <= 1e-5);
    CHECK(spread <= 1e-5);
  }
}

TEST_CASE("rescaling examples") {
  auto gauss = family("gaussian");
  const DiscreteCurve c1 = circle_curve(origin(), 1.0, 32);
  const FlowState at0 = rescale_state(FlowState::unnormalized(c1, gauss, 0.0));
  CHECK(at0.clock == 0.0);
  for (int i = 0; i < 32; ++i) CHECK((at0.curve[i] - c1[i]).norm() == 0.0);

  const FlowState late = rescale_state(FlowState::unnormalized(c1, gauss, 0.75));
  CHECK(late.kind == FlowKind::kNormalized);
  CHECK(late.clock == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  const auto [mean, spread] = radius_stats(late.curve, origin());
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(spread <= 1e-14);

  auto cyl = family("cylinder");
  const DiscreteCurve loop = latitude_curve(cyl->soliton(), 1.2, 32, "z", 1.0);
  const FlowState rc = rescale_state(FlowState::unnormalized(loop, cyl, 0.75));
  for (int i = 0; i < 32; ++i) {
    CHECK(rc.curve[i](2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(rc.curve[i](0) == loop[i](0));
    CHECK(rc.curve[i](1) == loop[i](1));
  }
  CHECK_THROWS_AS(rescale_state(FlowState::normalized(c1, gauss, 0.0)), ConfigError);
}

TEST_CASE("rescale round trip") {
  for (const char* name : {"gaussian", "sphere", "cylinder"}) {
    auto fam = family(name, 1.7);
    const DiscreteCurve c = std::string(name) == "gaussian"
                                ? ellipse_curve(vec({0.2, 0.1}), 1.5, 0.8, 48)
                                : latitude_curve(fam->soliton(), 1.1, 48, "x");
    for (double t : {0.0, 0.4, 1.2, 1.69}) {
      const FlowState st = FlowState::unnormalized(c, fam, t);
      const FlowState back = unrescale_state(rescale_state(st));
      CHECK(back.clock == doctest::Approx(t).epsilon(1e-12).scale(1e-12));
      for (int i = 0; i < c.size(); ++i) CHECK((back.curve[i] - c[i]).norm() <= 1e-12);
    }
  }
}

TEST_CASE("correspondence of the two flows") {
  auto gauss = family("gaussian");
  CHECK(correspondence_check(circle_curve(origin(), kSqrt2, 64), gauss, 0.5, 500) <= 1e-4);
  CHECK(correspondence_check(circle_curve(origin(), kSqrt2, 64), gauss, 1e-12, 1) <= 1e-10);
  CHECK(correspondence_check(circle_curve(origin(), kSqrt2, 64), gauss, 0.0, 1) == 0.0);
  CHECK_THROWS_AS(correspondence_check(circle_curve(origin(), 1.0, 32), gauss, 1.0, 10), DomainError);
}

TEST_CASE("flow errors") {
  auto gauss = family("gaussian");
  const FlowState st = FlowState::unnormalized(circle_curve(origin(), 1.0, 64), gauss);
  FlowSettings settings;
  const double limit = step_limit(st, settings);
  CHECK(limit > 0.0);
  try {
    step(st, 2 * limit, settings);
    FAIL("expected a step-size error");
  } catch (const StepSizeError& e) {
    CHECK(e.limit() == doctest::Approx(limit));
  }
  CHECK_NOTHROW(step(st, 0.5 * limit, settings));

  const FlowState late = FlowState::unnormalized(circle_curve(origin(), 1.0, 64), gauss, 1.0 - 1e-4);
  CHECK_THROWS_AS(step(late, 2e-4, settings), DomainError);
  CHECK_THROWS_AS(FlowState::unnormalized(circle_curve(origin(), 1.0, 64), gauss, 1.0), DomainError);
  CHECK_THROWS_AS(FlowState::normalized(circle_curve(origin(), 1.0, 64), gauss, -0.1), DomainError);

  FlowSettings tiny = settings;
  tiny.extinction_length = 100.0;
  try {
    step(st, 1e-6, tiny);
    FAIL("expected extinction");
  } catch (const ExtinctionSignal& e) {
    CHECK(e.clock() == 0.0);
    CHECK(e.length() == doctest::Approx(2 * kPi).epsilon(1e-5));
  }

  // A shrinking circle run past its singular time collapses before t = T.
  FlowSettings collapse = settings;
  collapse.extinction_length = 2.0;
  auto short_family = family("gaussian", 2.0);
  FlowState c = FlowState::unnormalized(circle_curve(origin(), 1.0, 64), short_family);
  CHECK_THROWS_AS(
      {
        for (int k = 1; k <= 1000; ++k) c = advance_to(c, k * 1e-3, collapse);
      },
      ExtinctionSignal);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  auto run = [] {
    FlowState st = FlowState::normalized(ellipse_curve(vec({0.1, 0}), 2.0, 1.0, 64), family("gaussian"), 0.0);
    FlowSettings settings;
    settings.remesh_every = 7;
    for (int k = 1; k <= 50; ++k) st = advance_to(st, k * 0.005, settings);
    return st;
  };
  const FlowState a = run();
  const FlowState b = run();
  CHECK(a.clock == b.clock);
  CHECK(a.step_count == b.step_count);
  for (int i = 0; i < a.curve.size(); ++i) CHECK((a.curve[i] - b.curve[i]).cwiseAbs().maxCoeff() == 0.0);
}
