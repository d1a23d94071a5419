#include "rmcf/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rmcf/errors.hpp"

namespace rmcf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

/// Flat "section.key" → value table with use tracking.
class Table {
 public:
  explicit Table(const std::string& text) {
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "unterminated section header");
        section = trim(s.substr(1, s.size() - 2));
        if (section.empty()) fail(line, "empty section name");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected key = value");
      const std::string key = trim(s.substr(0, eq));
      if (key.empty()) fail(line, "empty key");
      const std::string full = section.empty() ? key : section + "." + key;
      if (entries_.count(full)) fail(line, "duplicate key '" + full + "'");
      entries_[full] = {trim(s.substr(eq + 1)), line};
      order_.push_back(full);
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    used_.insert(key);
    return it->second.value;
  }

  std::string required(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required key '" + key + "'");
    return str(key, "");
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return to_number(key, str(key, ""));
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key, "");
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno != 0) bad(key, "an integer");
    return x;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key, "");
    if (v == "true") return true;
    if (v == "false") return false;
    bad(key, "true or false");
    return false;
  }

  std::vector<double> list(const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(str(key, ""));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(key, trim(item)));
    return out;
  }

  /// Keys of one section (without the prefix), marking them used.
  std::map<std::string, std::string> section(const std::string& name) {
    std::map<std::string, std::string> out;
    const std::string prefix = name + ".";
    for (const auto& [k, e] : entries_) {
      if (k.rfind(prefix, 0) != 0) continue;
      const std::string rest = k.substr(prefix.size());
      if (rest.find('.') != std::string::npos) continue;
      out[rest] = e.value;
      used_.insert(k);
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& k : order_)
      if (!used_.count(k)) fail(entries_.at(k).line, "unknown key '" + k + "'");
  }

  double to_number(const std::string& key, const std::string& v) const {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno != 0 || !std::isfinite(x)) bad(key, "a finite number");
    return x;
  }

 private:
  [[noreturn]] static void fail(int line, const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
  }
  [[noreturn]] void bad(const std::string& key, const std::string& expected) const {
    fail(entries_.at(key).line, "'" + key + "' must be " + expected);
  }

  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

int default_dim(const std::string& soliton) { return soliton == "cylinder" ? 3 : 2; }

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  Table t(text);
  ScenarioConfig c;

  const long long seed = t.integer("seed", 0);
  require(seed >= 0, "seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);

  auto& sol = c.soliton;
  sol.name = t.required("soliton.name");
  require(sol.name == "gaussian" || sol.name == "sphere" || sol.name == "cylinder",
          "unknown soliton '" + sol.name + "'");
  sol.dim = static_cast<int>(t.integer("soliton.dim", default_dim(sol.name)));
  for (const auto& [k, v] : t.section("soliton.params")) {
    require(k != "dim", "set the dimension with soliton.dim");
    sol.params[k] = t.to_number("soliton.params." + k, v);
  }
  auto params = sol.params;
  params["dim"] = sol.dim;
  make_soliton(sol.name, params);

  auto& cv = c.curve;
  cv.kind = t.required("curve.kind");
  cv.N = static_cast<int>(t.integer("curve.N", cv.N));
  require(cv.N >= kMinVertices, "curve.N must be at least " + std::to_string(kMinVertices));
  if (cv.kind == "circle" || cv.kind == "ellipse") {
    require(sol.name == "gaussian", "circle and ellipse curves need the gaussian soliton");
    cv.center = t.has("curve.center") ? t.list("curve.center") : std::vector<double>(sol.dim, 0.0);
    require(static_cast<int>(cv.center.size()) == sol.dim, "curve.center must have soliton.dim entries");
    if (cv.kind == "circle") {
      cv.radius = t.number("curve.radius", cv.radius);
      cv.warp = t.number("curve.warp", cv.warp);
      require(cv.radius > 0.0, "curve.radius must be positive");
      require(cv.warp >= 0.0 && cv.warp < 1.0, "curve.warp must lie in [0, 1)");
    } else {
      cv.a = t.number("curve.a", cv.a);
      cv.b = t.number("curve.b", cv.b);
      require(cv.a > 0.0 && cv.b > 0.0, "ellipse axes must be positive");
    }
  } else if (cv.kind == "latitude") {
    require(sol.name != "gaussian", "latitude curves need the sphere or cylinder soliton");
    cv.theta0 = t.number("curve.theta0", cv.theta0);
    cv.axis = t.str("curve.axis", cv.axis);
    require(cv.axis == "z" || cv.axis == "x", "curve.axis must be z or x");
    if (sol.name == "cylinder") {
      cv.height = t.number("curve.height", cv.height);
      cv.tilt = t.number("curve.tilt", cv.tilt);
    }
  } else if (cv.kind == "custom") {
    std::filesystem::path p = t.required("curve.path");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    require(std::filesystem::exists(p), "curve.path does not exist: " + p.string());
    cv.path = std::filesystem::weakly_canonical(p).string();
  } else {
    throw ConfigError("unknown curve.kind '" + cv.kind + "'");
  }

  auto& fl = c.flow;
  const std::string kind = t.required("flow.kind");
  if (kind == "unnormalized") fl.kind = FlowKind::kUnnormalized;
  else if (kind == "normalized") fl.kind = FlowKind::kNormalized;
  else throw ConfigError("flow.kind must be unnormalized or normalized");
  const std::string T = t.str("flow.T", "1");
  if (T == "auto") {
    require(sol.name == "gaussian", "flow.T = auto is supported for the gaussian soliton only");
    fl.auto_T = true;
    fl.pilot_dt = t.number("flow.pilot_dt", fl.pilot_dt);
    require(fl.pilot_dt > 0.0, "flow.pilot_dt must be positive");
  } else {
    fl.T = t.to_number("flow.T", T);
    require(fl.T > 0.0, "flow.T must be positive");
  }
  fl.dt = t.number("flow.dt", fl.dt);
  require(fl.dt > 0.0, "flow.dt must be positive");
  const char* abs_key = fl.kind == FlowKind::kUnnormalized ? "flow.t_end" : "flow.s_end";
  const char* rel_key = fl.kind == FlowKind::kUnnormalized ? "flow.t_end_fraction" : "flow.s_span";
  require(t.has(abs_key) != t.has(rel_key),
          std::string("exactly one of ") + abs_key + " and " + rel_key + " must be given");
  if (t.has(abs_key)) {
    fl.end_mode = EndMode::kAbsolute;
    fl.end = t.number(abs_key, 0.0);
    require(!fl.auto_T || fl.kind == FlowKind::kNormalized,
            "use flow.t_end_fraction together with flow.T = auto");
  } else {
    fl.end_mode = EndMode::kRelative;
    fl.end = t.number(rel_key, 0.0);
  }
  if (fl.kind == FlowKind::kUnnormalized) {
    if (fl.end_mode == EndMode::kRelative)
      require(fl.end > 0.0 && fl.end < 1.0, "flow.t_end_fraction must lie in (0, 1)");
    else
      require(fl.end > 0.0 && fl.end < fl.T, "flow.t_end must lie in (0, T)");
  } else {
    if (fl.end_mode == EndMode::kRelative) require(fl.end > 0.0, "flow.s_span must be positive");
    else require(fl.auto_T || fl.end > -std::log(fl.T), "flow.s_end must exceed -log T");
  }
  fl.remesh_every = static_cast<int>(t.integer("flow.remesh_every", fl.remesh_every));
  require(fl.remesh_every >= 0, "flow.remesh_every must be non-negative");
  fl.cfl = t.number("flow.cfl", fl.cfl);
  require(fl.cfl > 0.0, "flow.cfl must be positive");
  fl.extinction_length = t.number("flow.extinction_length", fl.extinction_length);
  require(fl.extinction_length > 0.0, "flow.extinction_length must be positive");

  auto& dg = c.diagnostics;
  dg.marked_vertex = static_cast<int>(t.integer("diagnostics.marked_vertex", 0));
  require(dg.marked_vertex >= 0 && dg.marked_vertex < cv.N, "diagnostics.marked_vertex out of range");
  const std::string cp = t.str("diagnostics.c_prime", "auto");
  if (cp != "auto") {
    dg.c_prime = t.to_number("diagnostics.c_prime", cp);
    require(*dg.c_prime > 0.0, "diagnostics.c_prime must be positive");
  }
  dg.monotonicity_slack = t.number("diagnostics.monotonicity_slack", dg.monotonicity_slack);
  dg.derivative_tolerance = t.number("diagnostics.derivative_tolerance", dg.derivative_tolerance);
  dg.derivative_floor = t.number("diagnostics.derivative_floor", dg.derivative_floor);
  dg.b2_bound = t.number("diagnostics.b2_bound", dg.b2_bound);
  require(dg.monotonicity_slack > 0.0 && dg.derivative_tolerance > 0.0 && dg.derivative_floor > 0.0 &&
              dg.b2_bound > 0.0,
          "diagnostic tolerances must be positive");
  const std::string sb = t.str("diagnostics.stone_bound", "none");
  if (sb != "none") {
    dg.stone_bound = t.to_number("diagnostics.stone_bound", sb);
    require(*dg.stone_bound > 0.0, "diagnostics.stone_bound must be positive");
  }
  dg.audit_monotonicity = t.boolean("diagnostics.audit_monotonicity", dg.audit_monotonicity);

  c.output.snapshot_every = static_cast<int>(t.integer("output.snapshot_every", c.output.snapshot_every));
  require(c.output.snapshot_every >= 1, "output.snapshot_every must be at least 1");
  c.output.directory = t.str("output.directory", "");

  t.reject_unused();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  ScenarioConfig c = parse_config(ss.str(), dir.empty() ? "." : dir.string());
  c.source = path;
  return c;
}

std::string echo_config(const ScenarioConfig& c) {
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };

  kv("seed", std::to_string(c.seed));
  o << "\n[soliton]\n";
  kv("name", c.soliton.name);
  kv("dim", std::to_string(c.soliton.dim));
  if (!c.soliton.params.empty()) {
    o << "\n[soliton.params]\n";
    for (const auto& [k, v] : c.soliton.params) num(k, v);
  }

  const auto& cv = c.curve;
  o << "\n[curve]\n";
  kv("kind", cv.kind);
  kv("N", std::to_string(cv.N));
  if (cv.kind == "circle" || cv.kind == "ellipse") {
    std::string list;
    for (size_t i = 0; i < cv.center.size(); ++i) list += (i ? ", " : "") + format_double(cv.center[i]);
    kv("center", list);
  }
  if (cv.kind == "circle") {
    num("radius", cv.radius);
    num("warp", cv.warp);
  } else if (cv.kind == "ellipse") {
    num("a", cv.a);
    num("b", cv.b);
  } else if (cv.kind == "latitude") {
    num("theta0", cv.theta0);
    kv("axis", cv.axis);
    if (c.soliton.name == "cylinder") {
      num("height", cv.height);
      num("tilt", cv.tilt);
    }
  } else if (cv.kind == "custom") {
    kv("path", cv.path);
  }

  const auto& fl = c.flow;
  const bool un = fl.kind == FlowKind::kUnnormalized;
  o << "\n[flow]\n";
  kv("kind", to_string(fl.kind));
  kv("T", fl.auto_T ? "auto" : format_double(fl.T));
  if (fl.auto_T) num("pilot_dt", fl.pilot_dt);
  num("dt", fl.dt);
  if (fl.end_mode == EndMode::kAbsolute) num(un ? "t_end" : "s_end", fl.end);
  else num(un ? "t_end_fraction" : "s_span", fl.end);
  kv("remesh_every", std::to_string(fl.remesh_every));
  num("cfl", fl.cfl);
  num("extinction_length", fl.extinction_length);

  const auto& dg = c.diagnostics;
  o << "\n[diagnostics]\n";
  kv("marked_vertex", std::to_string(dg.marked_vertex));
  kv("c_prime", dg.c_prime ? format_double(*dg.c_prime) : "auto");
  num("monotonicity_slack", dg.monotonicity_slack);
  num("derivative_tolerance", dg.derivative_tolerance);
  num("derivative_floor", dg.derivative_floor);
  num("b2_bound", dg.b2_bound);
  kv("stone_bound", dg.stone_bound ? format_double(*dg.stone_bound) : "none");
  kv("audit_monotonicity", dg.audit_monotonicity ? "true" : "false");

  o << "\n[output]\n";
  kv("snapshot_every", std::to_string(c.output.snapshot_every));
  if (!c.output.directory.empty()) kv("directory", c.output.directory);
  return o.str();
}

}  // namespace rmcf
