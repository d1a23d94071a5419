#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmcf/flow.hpp"

namespace rmcf {

struct SolitonSpec {
  std::string name = "gaussian";
  int dim = 2;
  std::map<std::string, double> params;
};

struct CurveSpec {
  std::string kind = "circle";  // circle | ellipse | latitude | custom
  int N = 128;
  std::vector<double> center;   // circle, ellipse (defaults to the origin)
  double radius = 1.0;          // circle
  double warp = 0.0;            // circle
  double a = 2.0, b = 1.0;      // ellipse semi-axes
  double theta0 = 1.0;          // latitude
  std::string axis = "z";       // latitude
  double height = 0.0;          // latitude on the cylinder
  double tilt = 0.0;            // latitude on the cylinder
  std::string path;             // custom: JSON list of chart points
};

enum class EndMode { kAbsolute, kRelative };

struct FlowSpec {
  FlowKind kind = FlowKind::kNormalized;
  bool auto_T = false;
  double T = 1.0;
  double dt = 1e-3;
  /// Unnormalized: t_end (absolute) or t_end_fraction of T (relative).
  /// Normalized: s_end (absolute) or s_span past −log T (relative).
  EndMode end_mode = EndMode::kRelative;
  double end = 1.0;
  int remesh_every = 50;
  double cfl = 0.4;
  double extinction_length = 1e-8;
  double pilot_dt = 1e-3;  // sampling interval of the T̂ pilot run
};

struct DiagnosticsSpec {
  int marked_vertex = 0;
  std::optional<double> c_prime;  // unset: 10 × initial residual integral
  double monotonicity_slack = 1e-8;
  double derivative_tolerance = 0.01;
  double derivative_floor = 1e-6;
  double b2_bound = 100.0;
  std::optional<double> stone_bound;
  bool audit_monotonicity = true;
};

struct OutputSpec {
  int snapshot_every = 10;
  std::string directory;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  SolitonSpec soliton;
  CurveSpec curve;
  FlowSpec flow;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  std::string source;  // file the config was read from, if any
};

/// Parses the sectioned key = value format. Unknown or duplicate keys, keys
/// that do not apply to the selected kinds, bad values and missing files are
/// ConfigErrors. Relative custom-curve paths resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

/// Canonical text of the effective configuration (all defaults spelled out,
/// numbers with 17 significant digits). parse_config(echo_config(c)) echoes
/// back byte-for-byte.
std::string echo_config(const ScenarioConfig& config);

/// "%.17g"
std::string format_double(double v);

}  // namespace rmcf
