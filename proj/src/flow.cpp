#include "rmcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmcf/errors.hpp"

namespace rmcf {

const char* to_string(FlowKind kind) {
  return kind == FlowKind::kUnnormalized ? "unnormalized" : "normalized";
}

FlowState FlowState::unnormalized(DiscreteCurve curve, std::shared_ptr<const RicciFlowFamily> family,
                                  double t) {
  FlowState s;
  s.curve = std::move(curve);
  s.family = std::move(family);
  s.family->tau(t);
  s.clock = t;
  s.kind = FlowKind::kUnnormalized;
  return s;
}

FlowState FlowState::normalized(DiscreteCurve curve, std::shared_ptr<const RicciFlowFamily> family,
                                double s) {
  FlowState st;
  st.curve = std::move(curve);
  st.family = std::move(family);
  if (s < -std::log(st.family->horizon()) - 1e-12)
    throw DomainError("normalized clock must satisfy s >= -log T");
  st.clock = s;
  st.kind = FlowKind::kNormalized;
  return st;
}

std::shared_ptr<const Geometry> FlowState::geometry() const {
  if (kind == FlowKind::kUnnormalized) return family->slice(clock);
  return family->soliton_ptr();
}

namespace {

std::shared_ptr<const Geometry> geometry_for(const FlowState& state, double clock) {
  if (state.kind == FlowKind::kUnnormalized) return state.family->slice(clock);
  return state.family->soliton_ptr();
}

bool with_gradient(FlowKind kind) { return kind == FlowKind::kNormalized; }

std::vector<Vec> velocity_at(const FlowState& state, std::vector<Vec> pts, double clock) {
  const auto g = geometry_for(state, clock);
  return curve_velocity(DiscreteCurve(std::move(pts)), *g, with_gradient(state.kind)).velocity;
}

std::vector<Vec> axpy(const std::vector<Vec>& x, double a, const std::vector<Vec>& k) {
  std::vector<Vec> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * k[i];
  return out;
}

double limit_from(const VelocitySample& v, const FlowSettings& settings) {
  const double w = v.min_measure_weight;
  return settings.cfl * w * w / std::max(1.0, v.max_A * v.max_A);
}

VelocitySample sample(const FlowState& state) {
  return curve_velocity(state.curve, *state.geometry(), with_gradient(state.kind));
}

FlowState rk4(const FlowState& state, const VelocitySample& first, double dt, const FlowSettings& settings) {
  if (!(dt > 0.0)) throw ConfigError("step size must be positive");
  if (state.kind == FlowKind::kUnnormalized && !(state.clock + dt < state.family->horizon()))
    throw DomainError("step would reach the horizon T");
  if (first.length < settings.extinction_length)
    throw ExtinctionSignal("curve length fell below the extinction length", state.clock, first.length);
  const double limit = limit_from(first, settings);
  if (dt > limit) throw StepSizeError("step exceeds the parabolic stability bound", limit);

  const auto& x = state.curve.vertices();
  const double c = state.clock;
  const auto& k1 = first.velocity;
  const auto k2 = velocity_at(state, axpy(x, 0.5 * dt, k1), c + 0.5 * dt);
  const auto k3 = velocity_at(state, axpy(x, 0.5 * dt, k2), c + 0.5 * dt);
  const auto k4 = velocity_at(state, axpy(x, dt, k3), c + dt);
  std::vector<Vec> next(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  FlowState out = state;
  out.curve = DiscreteCurve(std::move(next));
  out.clock = c + dt;
  out.step_count = state.step_count + 1;
  out.last_dt = dt;
  if (settings.remesh_every > 0 && out.step_count % settings.remesh_every == 0)
    out.curve = resample_by_arclength(out.curve, *out.geometry(), out.curve.size());
  return out;
}

}  // namespace

double step_limit(const FlowState& state, const FlowSettings& settings) {
  return limit_from(sample(state), settings);
}

FlowState step(const FlowState& state, double dt, const FlowSettings& settings) {
  return rk4(state, sample(state), dt, settings);
}

FlowState advance_to(FlowState state, double target, const FlowSettings& settings) {
  while (state.clock < target) {
    const double remaining = target - state.clock;
    const VelocitySample first = sample(state);
    const double limit = limit_from(first, settings);
    int pieces = 1;
    while (remaining / pieces > limit) {
      pieces *= 2;
      if (pieces > (1 << 30)) throw StepSizeError("step size underflow", limit);
    }
    const double h = remaining / pieces;
    state = rk4(state, first, h, settings);
    if (pieces == 1) state.clock = target;
  }
  return state;
}

FlowState rescale_state(const FlowState& state) {
  if (state.kind != FlowKind::kUnnormalized) throw ConfigError("rescale expects an unnormalized state");
  const auto& fam = *state.family;
  const double t = state.clock;
  const double tau = fam.tau(t);
  std::vector<Vec> pts;
  pts.reserve(state.curve.size());
  for (const auto& v : state.curve.vertices()) pts.push_back(fam.phi_at(v, t));
  FlowState out = state;
  out.curve = DiscreteCurve(std::move(pts));
  out.clock = -std::log(tau);
  out.kind = FlowKind::kNormalized;
  return out;
}

FlowState unrescale_state(const FlowState& state) {
  if (state.kind != FlowKind::kNormalized) throw ConfigError("unrescale expects a normalized state");
  const auto& fam = *state.family;
  const double t = fam.horizon() - std::exp(-state.clock);
  std::vector<Vec> pts;
  pts.reserve(state.curve.size());
  for (const auto& v : state.curve.vertices()) pts.push_back(fam.phi_inverse(v, t));
  FlowState out = state;
  out.curve = DiscreteCurve(std::move(pts));
  out.clock = t;
  out.kind = FlowKind::kUnnormalized;
  return out;
}

double correspondence_check(const DiscreteCurve& initial,
                            std::shared_ptr<const RicciFlowFamily> family, double t_end, int steps,
                            const FlowSettings& settings) {
  if (!(t_end >= 0.0) || !(t_end < family->horizon())) throw DomainError("t_end must lie in [0, T)");
  if (steps < 1) throw ConfigError("correspondence check needs at least one step");
  FlowSettings fixed = settings;
  fixed.remesh_every = 0;

  FlowState a = FlowState::unnormalized(initial, family, 0.0);
  FlowState b = rescale_state(a);
  if (t_end > 0.0) {
    const double dt = t_end / steps;
    const double s0 = b.clock;
    const double s1 = -std::log(family->horizon() - t_end);
    const double ds = (s1 - s0) / steps;
    for (int k = 0; k < steps; ++k) {
      a = step(a, dt, fixed);
      b = step(b, ds, fixed);
    }
    a.clock = t_end;
    b.clock = s1;
  }
  const FlowState ra = rescale_state(a);
  const Chart& chart = family->soliton().chart();
  double worst = 0.0;
  for (int i = 0; i < initial.size(); ++i)
    worst = std::max(worst, chart.delta(b.curve[i], ra.curve[i]).norm());
  return worst;
}

}  // namespace rmcf
