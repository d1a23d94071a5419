#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "rmcf/flow.hpp"

namespace rmcf {

/// Scalar diagnostics of one snapshot. For unnormalized states every entry
/// except clock, type_one and length is evaluated on the rescaled curve Φ_t ∘ F_t.
struct TimeSeriesRecord {
  double clock = 0.0;
  double weighted_volume = 0.0;
  double residual_integral = 0.0;
  double stone = 0.0;
  double type_one = 0.0;
  double max_defect = 0.0;
  double f_at_marked = 0.0;
  double length = 0.0;  // in the metric the state flows in
};

TimeSeriesRecord make_record(const FlowState& state, int marked_vertex = 0);

/// √(T − t) max |A|_{g_t} for unnormalized states, max |Ã|_{g̃} for normalized ones.
double type_one_monitor(const FlowState& state);

struct SingularTimeEstimate {
  double T_hat = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double fit_quality = 0.0;  // R² of the linear fit
};

/// Least-squares line through (t, 1/max|A|²); T̂ is its root.
/// Throws InputError for fewer than 10 samples or non-increasing times and
/// NoBlowupSignal when the curvature does not grow.
SingularTimeEstimate estimate_singular_time(const std::vector<std::pair<double, double>>& history);

struct AuditReport {
  std::string name;
  bool passed = true;
  std::vector<std::string> failures;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct MonotonicityOptions {
  /// Records of an unnormalized run have clock t; derivatives are then taken in
  /// s = −log(T − t).
  bool unnormalized_clock = false;
  double horizon = 1.0;
  double slack = 1e-8;             // relative, for W non-increasing
  double derivative_tolerance = 0.01;
  double derivative_floor = 1e-6;  // absolute allowance next to the relative one
  /// Bound on |d²W/ds²|; negative selects 10 · max(initial residual, derivative_floor).
  double c_prime = -1.0;
};

/// (i) W non-increasing, (ii) dW/ds ≈ −residual at interior records, (iii) |d²W/ds²| ≤ C'.
/// Throws InputError for fewer than three records.
AuditReport monotonicity_audit(const std::vector<TimeSeriesRecord>& series,
                               const MonotonicityOptions& options = {});

/// max_i |∂_t g_uu + 2(Ric(∂_u F, ∂_u F) + g(H, A_uu))| with ∂_t from RK4 probes of
/// size dt_probe (centered, or forward when centered is false).
double induced_metric_evolution_residual(const FlowState& state, double dt_probe, bool centered = true);

/// max_i |∂_t|A|² − (Δ|A|² − 2|∇^⊥_s H|² + 2|A|⁴)| in a flat ambient.
/// Throws UnsupportedBackgroundError on curved solitons.
double curvature_evolution_residual_flat(const FlowState& state, double dt_probe, bool centered = true);

struct B2Report {
  double sup_f = 0.0;
  bool divergent = false;
  double bound = 0.0;
};

/// Sup of f̃ at the marked vertex; divergent when it exceeds `bound` or is not finite.
B2Report b2_boundedness_monitor(const std::vector<double>& marked_f_values, double bound);

}  // namespace rmcf
