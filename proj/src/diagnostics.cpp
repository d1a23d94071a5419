#include "rmcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rmcf/errors.hpp"
#include "rmcf/functionals.hpp"

namespace rmcf {

double type_one_monitor(const FlowState& state) {
  const CurveGeometry geom = compute_geometry(state.curve, *state.geometry());
  if (state.kind == FlowKind::kUnnormalized)
    return std::sqrt(state.family->tau(state.clock)) * geom.max_A();
  return geom.max_A();
}

TimeSeriesRecord make_record(const FlowState& state, int marked_vertex) {
  const bool unnormalized = state.kind == FlowKind::kUnnormalized;
  const FlowState rescaled = unnormalized ? rescale_state(state) : state;
  const CurveGeometry geom = compute_geometry(rescaled.curve, rescaled.soliton());
  TimeSeriesRecord r;
  r.clock = state.clock;
  r.weighted_volume = weighted_volume(geom).value;
  r.residual_integral = shrinker_residual_integral(geom).value;
  r.stone = stone_functional(geom).value;
  for (int i = 0; i < geom.size(); ++i)
    r.max_defect = std::max(r.max_defect, norm(geom.metric[i], geom.shrinker_defect[i]));
  r.f_at_marked = geom.potential[state.curve.wrap(marked_vertex)];
  if (unnormalized) {
    const CurveGeometry own = compute_geometry(state.curve, *state.geometry());
    r.type_one = std::sqrt(state.family->tau(state.clock)) * own.max_A();
    r.length = own.length();
  } else {
    r.type_one = geom.max_A();
    r.length = geom.length();
  }
  return r;
}

SingularTimeEstimate estimate_singular_time(const std::vector<std::pair<double, double>>& history) {
  const int m = static_cast<int>(history.size());
  if (m < 10) throw InputError("singular-time fit needs at least 10 samples");
  for (int i = 1; i < m; ++i)
    if (!(history[i].first > history[i - 1].first)) throw InputError("sample times must increase");
  for (const auto& [t, a] : history)
    if (!(a > 0.0) || !std::isfinite(a)) throw NoBlowupSignal("curvature vanishes or is not finite");
  if (!(history.back().second > history.front().second * (1.0 + 1e-9)))
    throw NoBlowupSignal("curvature does not grow over the history");

  double st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& [t, a] : history) {
    const double y = 1.0 / (a * a);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = m * stt - st * st;
  const double slope = (m * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / m;
  if (!(slope < 0.0)) throw NoBlowupSignal("1/|A|^2 does not decrease");

  double ss_res = 0, ss_tot = 0;
  const double mean = sy / m;
  for (const auto& [t, a] : history) {
    const double y = 1.0 / (a * a);
    ss_res += std::pow(y - (intercept + slope * t), 2);
    ss_tot += std::pow(y - mean, 2);
  }
  SingularTimeEstimate est;
  est.T_hat = -intercept / slope;
  est.t_lo = history.front().first;
  est.t_hi = history.back().first;
  est.fit_quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (!(est.T_hat > est.t_hi)) throw NoBlowupSignal("fitted singular time lies inside the window");
  return est;
}

nlohmann::json AuditReport::to_json() const {
  nlohmann::json j;
  j["audit"] = name;
  j["passed"] = passed;
  j["failures"] = failures;
  j["details"] = details;
  return j;
}

namespace {

std::string at_clock(const char* what, double s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s at s=%.17g", what, s);
  return buf;
}

}  // namespace

AuditReport monotonicity_audit(const std::vector<TimeSeriesRecord>& series,
                               const MonotonicityOptions& options) {
  const int m = static_cast<int>(series.size());
  if (m < 3) throw InputError("monotonicity audit needs at least three records");
  std::vector<double> s(m), w(m), r(m);
  for (int i = 0; i < m; ++i) {
    const double c = series[i].clock;
    s[i] = options.unnormalized_clock ? -std::log(options.horizon - c) : c;
    w[i] = series[i].weighted_volume;
    r[i] = series[i].residual_integral;
  }
  const double c_prime =
      options.c_prime >= 0.0 ? options.c_prime : 10.0 * std::max(r[0], options.derivative_floor);

  AuditReport rep;
  rep.name = "monotonicity";
  double worst_increase = 0.0, worst_mismatch = 0.0, worst_second = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    const double inc = w[i + 1] - w[i];
    worst_increase = std::max(worst_increase, inc / std::max(std::abs(w[i]), 1e-300));
    if (inc > options.slack * std::abs(w[i])) {
      rep.passed = false;
      rep.failures.push_back(at_clock("weighted_volume increased", s[i + 1]));
    }
  }
  for (int i = 1; i + 1 < m; ++i) {
    const double h0 = s[i] - s[i - 1], h1 = s[i + 1] - s[i];
    const double dm = w[i - 1] - w[i], dp = w[i + 1] - w[i];
    const double first = (dp * h0 / h1 - dm * h1 / h0) / (h0 + h1);
    const double second = 2.0 * (dp / h1 + dm / h0) / (h0 + h1);
    const double mismatch = std::abs(first + r[i]);
    worst_mismatch = std::max(worst_mismatch, mismatch / std::max(r[i], options.derivative_floor));
    if (mismatch > options.derivative_tolerance * r[i] + options.derivative_floor) {
      rep.passed = false;
      rep.failures.push_back(at_clock("dW/ds differs from -residual", s[i]));
    }
    worst_second = std::max(worst_second, std::abs(second));
    if (std::abs(second) > c_prime) {
      rep.passed = false;
      rep.failures.push_back(at_clock("second derivative exceeds C'", s[i]));
    }
  }
  rep.details["records"] = m;
  rep.details["max_relative_increase"] = worst_increase;
  rep.details["max_derivative_mismatch"] = worst_mismatch;
  rep.details["max_second_derivative"] = worst_second;
  rep.details["c_prime"] = c_prime;
  return rep;
}

namespace {

DiscreteCurve rk4_probe(const FlowState& state, double h) {
  const auto& fam = *state.family;
  const double t = state.clock;
  auto vel = [&](const std::vector<Vec>& pts, double time) {
    return curve_velocity(DiscreteCurve(pts), *fam.slice(time), false).velocity;
  };
  const auto& x = state.curve.vertices();
  auto shifted = [&](double a, const std::vector<Vec>& k) {
    std::vector<Vec> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * k[i];
    return out;
  };
  const auto k1 = vel(x, t);
  const auto k2 = vel(shifted(0.5 * h, k1), t + 0.5 * h);
  const auto k3 = vel(shifted(0.5 * h, k2), t + 0.5 * h);
  const auto k4 = vel(shifted(h, k3), t + h);
  std::vector<Vec> next(x.size());
  for (size_t i = 0; i < x.size(); ++i) next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return DiscreteCurve(std::move(next));
}

void require_unnormalized(const FlowState& state) {
  if (state.kind != FlowKind::kUnnormalized)
    throw ConfigError("evolution residuals need an unnormalized state");
}

/// (q(t + h) − q(t − h)) / 2h or (q(t + h) − q(t)) / h per vertex.
template <class Quantity>
std::vector<double> time_derivative(const FlowState& state, double h, bool centered, Quantity&& q) {
  if (!(h > 0.0)) throw ConfigError("dt_probe must be positive");
  const double t = state.clock;
  const std::vector<double> plus = q(rk4_probe(state, h), t + h);
  const std::vector<double> minus = centered ? q(rk4_probe(state, -h), t - h) : q(state.curve, t);
  std::vector<double> out(plus.size());
  const double span = centered ? 2.0 * h : h;
  for (size_t i = 0; i < out.size(); ++i) out[i] = (plus[i] - minus[i]) / span;
  return out;
}

}  // namespace

double induced_metric_evolution_residual(const FlowState& state, double dt_probe, bool centered) {
  require_unnormalized(state);
  const auto& fam = *state.family;
  const auto g_uu = [&](const DiscreteCurve& c, double time) {
    const CurveGeometry geom = compute_geometry(c, *fam.slice(time));
    std::vector<double> out(geom.size());
    for (int i = 0; i < geom.size(); ++i) out[i] = geom.speed[i] * geom.speed[i];
    return out;
  };
  const std::vector<double> lhs = time_derivative(state, dt_probe, centered, g_uu);
  const CurveGeometry geom = compute_geometry(state.curve, *state.geometry());
  double worst = 0.0;
  for (int i = 0; i < geom.size(); ++i) {
    const Mat ric = curvature(fam.jet(geom.position[i], state.clock, 2)).ricci;
    const Vec& t = geom.tangent[i];
    const double sigma2 = geom.speed[i] * geom.speed[i];
    const double h_dot_a = sigma2 * inner(geom.metric[i], geom.H[i], geom.H[i]);
    worst = std::max(worst, std::abs(lhs[i] + 2.0 * (inner(ric, t, t) + h_dot_a)));
  }
  return worst;
}

double curvature_evolution_residual_flat(const FlowState& state, double dt_probe, bool centered) {
  require_unnormalized(state);
  if (!state.soliton().is_flat())
    throw UnsupportedBackgroundError("the |A|^2 evolution check is implemented for flat ambients only");
  const auto& fam = *state.family;
  const auto a2 = [&](const DiscreteCurve& c, double time) {
    const CurveGeometry geom = compute_geometry(c, *fam.slice(time));
    std::vector<double> out(geom.size());
    for (int i = 0; i < geom.size(); ++i) out[i] = geom.A_norm[i] * geom.A_norm[i];
    return out;
  };
  const std::vector<double> lhs = time_derivative(state, dt_probe, centered, a2);
  const CurveGeometry geom = compute_geometry(state.curve, *state.geometry());
  const std::vector<double> here = a2(state.curve, state.clock);
  const std::vector<double> lap = curve_laplacian(geom, here);
  const std::vector<Vec> dh = periodic_d1(geom.H, state.curve.du());
  double worst = 0.0;
  for (int i = 0; i < geom.size(); ++i) {
    const Vec grad_h = normal_part(geom.metric[i], geom.unit_tangent[i], dh[i] / geom.speed[i]);
    const double rhs = lap[i] - 2.0 * inner(geom.metric[i], grad_h, grad_h) + 2.0 * here[i] * here[i];
    worst = std::max(worst, std::abs(lhs[i] - rhs));
  }
  return worst;
}

B2Report b2_boundedness_monitor(const std::vector<double>& marked_f_values, double bound) {
  B2Report r;
  r.bound = bound;
  for (double f : marked_f_values) {
    if (!std::isfinite(f)) {
      r.divergent = true;
      r.sup_f = std::numeric_limits<double>::infinity();
      return r;
    }
    r.sup_f = std::max(r.sup_f, f);
  }
  r.divergent = r.sup_f > bound;
  return r;
}

}  // namespace rmcf
