#pragma once

#include <functional>
#include <memory>

#include "rmcf/family.hpp"
#include "rmcf/immersion.hpp"

namespace rmcf {

enum class FlowKind { kUnnormalized, kNormalized };

const char* to_string(FlowKind kind);

struct FlowSettings {
  double cfl = 0.4;
  int remesh_every = 50;  // 0 disables resampling
  double extinction_length = 1e-8;
};

/// Unnormalized: ∂_t F = H(F) in g_t, clock t < T.
/// Normalized: ∂_s F = H(F) + ∇f̃ in g̃, clock s ≥ −log T.
struct FlowState {
  DiscreteCurve curve;
  double clock = 0.0;
  FlowKind kind = FlowKind::kNormalized;
  std::shared_ptr<const RicciFlowFamily> family;
  long step_count = 0;
  double last_dt = 0.0;

  static FlowState unnormalized(DiscreteCurve curve, std::shared_ptr<const RicciFlowFamily> family,
                                double t = 0.0);
  static FlowState normalized(DiscreteCurve curve, std::shared_ptr<const RicciFlowFamily> family,
                              double s);

  const AmbientSoliton& soliton() const { return family->soliton(); }
  /// The metric the velocity is measured in at this clock (g_t or g̃).
  std::shared_ptr<const Geometry> geometry() const;
};

/// Largest admissible step: cfl · (min measure weight)² / max(1, max |A|²).
double step_limit(const FlowState& state, const FlowSettings& settings);

/// One classical RK4 step. Throws StepSizeError above step_limit, DomainError
/// when t + dt reaches T or a vertex leaves the chart, ExtinctionSignal when
/// the current length is below settings.extinction_length.
FlowState step(const FlowState& state, double dt, const FlowSettings& settings);

/// Steps to exactly `target`, splitting the interval into 2^k equal pieces
/// whenever the remaining span exceeds the step limit.
FlowState advance_to(FlowState state, double target, const FlowSettings& settings);

/// F̃ = Φ_t ∘ F with s = −log(T − t).
FlowState rescale_state(const FlowState& state);
FlowState unrescale_state(const FlowState& state);

/// Evolves `initial` unnormalized from t = 0 to t_end and, separately, its
/// rescaling from s = −log T to −log(T − t_end), both with `steps` uniform RK4
/// steps and no resampling. Returns the max chart distance between corresponding
/// vertices after rescaling the first result.
double correspondence_check(const DiscreteCurve& initial,
                            std::shared_ptr<const RicciFlowFamily> family, double t_end, int steps,
                            const FlowSettings& settings = {});

}  // namespace rmcf
