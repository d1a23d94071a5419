#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmcf/config.hpp"
#include "rmcf/diagnostics.hpp"
#include "rmcf/functionals.hpp"

namespace rmcf {

struct RunArtifacts {
  std::string series_csv_path;
  std::string snapshots_jsonl_path;
  std::string audit_json_path;
  std::string config_echo_path;
};

/// How the main flow stopped.
enum class Termination { kCompleted, kExtinction, kDomainError };

const char* to_string(Termination t);

struct RunResult {
  RunArtifacts artifacts;
  Termination termination = Termination::kCompleted;
  std::string message;  // extinction or domain error text
  std::optional<SingularTimeEstimate> T_hat;
  double horizon = 0.0;  // T used by the main run
  std::vector<TimeSeriesRecord> series;
  std::vector<AuditReport> audits;
  bool audits_passed = true;
  nlohmann::json audit;  // contents of audit.json
};

std::shared_ptr<const AmbientSoliton> build_soliton(const SolitonSpec& spec);

/// Initial curve in chart coordinates of the soliton. For gaussian runs with
/// flow.T = auto this is the physical curve; the runner divides it by √T̂.
DiscreteCurve build_curve(const CurveSpec& spec, const AmbientSoliton& soliton);

/// Pilot unnormalized run on a family of horizon T_p (1, doubled until the
/// curve blows up first), stopped at 0.95·T_p or at 10% of the initial length.
/// The fit uses the last tenth of the samples taken every `pilot_dt`.
SingularTimeEstimate estimate_horizon(const DiscreteCurve& physical_curve,
                                      std::shared_ptr<const AmbientSoliton> soliton,
                                      double pilot_dt, const FlowSettings& settings);

/// Runs one scenario and writes series.csv, snapshots.jsonl, audit.json and
/// config.cfg into `out_dir` (created if needed). Extinction and domain errors
/// during the flow end the run early; the artifacts written so far are kept.
RunResult run_scenario(const ScenarioConfig& config, const std::string& out_dir);

/// 0 pass, 1 audit failure (strict only), 3 domain error.
int exit_code(const RunResult& result, bool strict);

struct BatchItem {
  ScenarioConfig config;
  std::string out_dir;
};

struct BatchOutcome {
  std::optional<RunResult> result;
  int exit_code = 0;
  std::string error;  // set when the scenario threw before finishing
};

/// Runs independent scenarios on `jobs` worker threads. Outcomes keep input order.
std::vector<BatchOutcome> run_batch(const std::vector<BatchItem>& items, int jobs, bool strict);

struct IdentityReport {
  std::string soliton;
  int samples = 0;
  std::uint64_t seed = 0;
  double soliton_equation = 0.0;         // static soliton, analytic
  double normalization = 0.0;            // static soliton, analytic
  double family_soliton_equation = 0.0;  // g_t, analytic
  double family_normalization = 0.0;     // g_t, analytic
  double ricci_flow = 0.0;               // finite difference in t
  double conjugate_heat = 0.0;           // finite difference in t
  double analytic_tolerance = 1e-10;
  double fd_tolerance = 1e-6;
  bool passed = false;

  double max_analytic() const;
  double max_fd() const;
  nlohmann::json to_json() const;
};

/// Residuals at `samples` seeded random chart points and times t ∈ [0, 0.9]
/// of the family with T = 1.
IdentityReport check_identities(const std::string& soliton, int samples, std::uint64_t seed);

struct VariationRow {
  int direction = 0;
  std::vector<double> eps;
  std::vector<double> rel_error;  // |RHS − FD| / max(1, |FD|) per eps
  double rhs = 0.0;
  double fd = 0.0;  // at the best eps
  double best_error = 0.0;
  bool passed = false;
};

struct VariationReport {
  std::vector<VariationRow> rows;
  double tolerance = 1e-5;
  /// RHS in the direction of the flow versus −∫ u |H + ∇f^⊥|² ρ dμ.
  double monotonicity_rhs = 0.0;
  double monotonicity_expected = 0.0;
  double monotonicity_rel_error = 0.0;
  /// max |RHS(τ) − RHS(τ')| over the directions.
  double tau_invariance = 0.0;
  bool passed = false;

  nlohmann::json to_json() const;
};

/// Base point from the config's family at t = 0: curve, g_0, ρ_0 and
/// u = (4πT)^{(n−1)/2}. Direction 0 is zero; the others are seeded random
/// low-frequency perturbations. Each eps that makes g + εh degenerate is
/// divided by 10 until it works or drops below 1e-7.
VariationReport variation_test(const ScenarioConfig& config, int directions,
                               const std::vector<double>& eps_ladder = {1e-3, 1e-4, 1e-5});

}  // namespace rmcf
