#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rmcf/errors.hpp"
#include "rmcf/scenario.hpp"

using namespace rmcf;
using testing::kSqrt2;
using testing::scenario;
using testing::scratch_dir;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const char* kMinimal = R"(seed = 3
[soliton]
name = gaussian
[curve]
kind = circle
N = 32
radius = 1.5
[flow]
kind = normalized
T = 1
dt = 0.01
s_span = 0.1
)";

}  // namespace

TEST_CASE("config echo round-trips byte for byte") {
  for (const auto& entry : fs::directory_iterator(RMCF_SCENARIO_DIR)) {
    const ScenarioConfig cfg = load_config(entry.path().string());
    const std::string echo = echo_config(cfg);
    CAPTURE(entry.path().string());
    CHECK(echo_config(parse_config(echo)) == echo);
  }
  const ScenarioConfig minimal = parse_config(kMinimal);
  CHECK(minimal.seed == 3);
  CHECK(minimal.curve.center == std::vector<double>{0.0, 0.0});
  CHECK(minimal.flow.remesh_every == 50);
  CHECK(minimal.flow.cfl == 0.4);
  CHECK(echo_config(parse_config(echo_config(minimal))) == echo_config(minimal));
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(load_config(std::string(RMCF_TEST_DATA_DIR) + "/bad_key.cfg"),
                       doctest::Contains("unknown key 'curve.raduis'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(std::string(kMinimal) + "dt = 0.02\n"), doctest::Contains("duplicate key"),
                       ConfigError);
  // Keys that do not apply to the chosen curve kind are rejected like typos.
  CHECK_THROWS_WITH_AS(parse_config(std::string(kMinimal) + "[curve]\ntheta0 = 1\n"),
                       doctest::Contains("unknown key 'curve.theta0'"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/scenario.cfg"), ConfigError);

  std::string no_end = kMinimal;
  no_end.replace(no_end.find("s_span = 0.1"), 12, "");
  CHECK_THROWS_AS(parse_config(no_end), ConfigError);
  std::string both = std::string(kMinimal) + "[flow]\ns_end = 2\n";
  CHECK_THROWS_AS(parse_config(both), ConfigError);

  const std::vector<std::pair<std::string, std::string>> bad{
      {"radius = 1.5", "radius = -1"},     {"N = 32", "N = 8"},
      {"dt = 0.01", "dt = 0"},             {"kind = normalized", "kind = sideways"},
      {"name = gaussian", "name = torus"}, {"radius = 1.5", "radius = 1.5x"},
      {"seed = 3", "seed = -1"},           {"T = 1", "T = nope"},
      {"kind = circle", "kind = latitude"}};
  for (const auto& [from, to] : bad) {
    std::string text = kMinimal;
    text.replace(text.find(from), from.size(), to);
    CAPTURE(to);
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }

  auto dir = scratch_dir("config_errors");
  std::ofstream(dir / "missing.cfg") << "[soliton]\nname = gaussian\n[curve]\nkind = custom\npath = nope.json\n"
                                        "[flow]\nkind = normalized\nT = 1\ndt = 0.01\ns_span = 1\n";
  CHECK_THROWS_WITH_AS(load_config((dir / "missing.cfg").string()), doctest::Contains("does not exist"),
                       ConfigError);
}

TEST_CASE("custom curves resolve relative to the config file") {
  auto dir = scratch_dir("custom");
  std::ofstream pts(dir / "square.json");
  pts << "[";
  for (int i = 0; i < 32; ++i) {
    const double a = 2 * std::acos(-1.0) * i / 32;
    pts << (i ? "," : "") << "[" << format_double(kSqrt2 * std::cos(a)) << "," << format_double(kSqrt2 * std::sin(a))
        << "]";
  }
  pts << "]";
  pts.close();
  std::ofstream(dir / "custom.cfg") << "[soliton]\nname = gaussian\n[curve]\nkind = custom\nN = 32\npath = square.json\n"
                                       "[flow]\nkind = normalized\nT = 1\ndt = 0.01\ns_span = 0.2\n";
  const ScenarioConfig cfg = load_config((dir / "custom.cfg").string());
  const DiscreteCurve c = build_curve(cfg.curve, *build_soliton(cfg.soliton));
  CHECK(c.size() == 32);
  CHECK(c[8](1) == doctest::Approx(kSqrt2).epsilon(1e-15));
  const RunResult r = run_scenario(cfg, (dir / "out").string());
  CHECK(r.termination == Termination::kCompleted);
  CHECK(r.series.back().max_defect <= 1e-3);
}

TEST_CASE("bundled circle scenario follows the circle law") {
  auto dir = scratch_dir("circle_gaussian");
  const RunResult r = run_scenario(load_config(scenario("circle_gaussian.cfg")), dir.string());
  REQUIRE(r.termination == Termination::kCompleted);
  REQUIRE(r.T_hat.has_value());
  CHECK(r.T_hat->T_hat == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.audits_passed);
  std::string header;
  const auto rows = read_csv(r.artifacts.series_csv_path, &header);
  CHECK(header == "clock,weighted_volume,residual_integral,stone,type_one,max_defect,f_at_marked,length");
  REQUIRE(rows.size() == r.series.size());
  CHECK(std::abs(rows.back()[4] - 1.0 / kSqrt2) <= 1e-3);
  for (const auto& row : rows) CHECK(row[3] <= 1.05 * 4 * std::acos(-1.0) * std::exp(-0.5));
  for (const auto& p : {r.artifacts.series_csv_path, r.artifacts.snapshots_jsonl_path, r.artifacts.audit_json_path,
                        r.artifacts.config_echo_path})
    CHECK(fs::exists(p));
  const auto audit = nlohmann::json::parse(slurp(r.artifacts.audit_json_path));
  CHECK(audit["termination"] == "completed");
  CHECK(audit["passed"] == true);
  CHECK(audit.contains("singular_time"));
}

TEST_CASE("bundled equator scenario stays a geodesic") {
  auto dir = scratch_dir("equator");
  const RunResult r = run_scenario(load_config(scenario("equator_sphere.cfg")), dir.string());
  CHECK(r.termination == Termination::kCompleted);
  for (const auto& row : read_csv(r.artifacts.series_csv_path)) CHECK(row[5] <= 1e-6);
  // Each snapshot line carries the clock and the chart vertices.
  std::ifstream snaps(r.artifacts.snapshots_jsonl_path);
  std::string line;
  int count = 0;
  while (std::getline(snaps, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["vertices"].size() == 64);
    CHECK(j["vertices"][0].size() == 2);
    CHECK(j.contains("clock"));
    ++count;
  }
  CHECK(count == static_cast<int>(r.series.size()));
}

TEST_CASE("bundled ellipse scenario has a monotone weighted volume") {
  auto dir = scratch_dir("ellipse");
  const RunResult r = run_scenario(load_config(scenario("ellipse_gaussian.cfg")), dir.string());
  CHECK(r.termination == Termination::kCompleted);
  CHECK(r.audits_passed);
  const auto rows = read_csv(r.artifacts.series_csv_path);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] <= rows[i - 1][1] * (1 + 1e-8));
}

TEST_CASE("runs are byte-for-byte reproducible") {
  const ScenarioConfig cfg = load_config(scenario("shrinker_gaussian.cfg"));
  auto a = scratch_dir("repro_a");
  auto b = scratch_dir("repro_b");
  const RunResult ra = run_scenario(cfg, a.string());
  const RunResult rb = run_scenario(cfg, b.string());
  for (const char* f : {"series.csv", "snapshots.jsonl", "audit.json", "config.cfg"})
    CHECK(slurp(a / f) == slurp(b / f));
  // The echoed config reproduces the run.
  const RunResult rc = run_scenario(load_config((a / "config.cfg").string()), scratch_dir("repro_c").string());
  CHECK(slurp(a / "series.csv") == slurp(rc.artifacts.series_csv_path));
  CHECK(ra.series.size() == rb.series.size());
}

TEST_CASE("exit codes and terminations") {
  RunResult ok;
  CHECK(exit_code(ok, true) == 0);
  RunResult failed;
  failed.audits_passed = false;
  CHECK(exit_code(failed, false) == 0);
  CHECK(exit_code(failed, true) == 1);
  RunResult domain;
  domain.termination = Termination::kDomainError;
  CHECK(exit_code(domain, false) == 3);

  auto dir = scratch_dir("latitude");
  const RunResult lat = run_scenario(load_config(scenario("latitude_sphere.cfg")), dir.string());
  CHECK(lat.termination == Termination::kExtinction);
  CHECK(exit_code(lat, true) == 0);
  CHECK(lat.audit.contains("extinction"));
  CHECK(lat.audit["monitors"]["b2"]["sup_f"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::string(to_string(Termination::kExtinction)) == "extinction");
}

TEST_CASE("batch runs keep input order") {
  auto dir = scratch_dir("batch");
  std::vector<BatchItem> items;
  for (const char* name : {"equator_sphere.cfg", "shrinker_gaussian.cfg", "cylinder_equator.cfg"})
    items.push_back({load_config(scenario(name)), (dir / name).string()});
  const auto outcomes = run_batch(items, 3, true);
  REQUIRE(outcomes.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    REQUIRE(outcomes[i].result.has_value());
    CHECK(outcomes[i].exit_code == 0);
    CHECK(outcomes[i].result->artifacts.series_csv_path == (fs::path(items[i].out_dir) / "series.csv").string());
  }
  // Same bytes as a sequential run.
  const RunResult single = run_scenario(items[1].config, (dir / "single").string());
  CHECK(slurp(single.artifacts.series_csv_path) == slurp(outcomes[1].result->artifacts.series_csv_path));
}

TEST_CASE("identity checks") {
  const IdentityReport g = check_identities("gaussian", 1000, 7);
  CHECK(g.passed);
  CHECK(g.max_analytic() <= 1e-12);
  CHECK(g.max_fd() <= 1e-6);
  for (const char* name : {"sphere", "cylinder"}) {
    const IdentityReport r = check_identities(name, 1000, 7);
    CHECK(r.passed);
    CHECK(r.max_analytic() <= 1e-10);
    CHECK(r.max_fd() <= 1e-6);
  }
  CHECK(check_identities("sphere", 50, 3).to_json().dump() == check_identities("sphere", 50, 3).to_json().dump());
  CHECK_THROWS_AS(check_identities("torus", 10, 1), ConfigError);
}

TEST_CASE("variation test on the flat circle") {
  const VariationReport rep = variation_test(load_config(scenario("variation_circle_gaussian.cfg")), 20);
  REQUIRE(rep.rows.size() == 20);
  CHECK(rep.passed);
  CHECK(rep.rows[0].fd == 0.0);
  for (const auto& row : rep.rows) CHECK(row.best_error <= 1e-5);
  CHECK(rep.monotonicity_rel_error <= 0.01);
  CHECK(rep.monotonicity_rhs < 0.0);
  CHECK(rep.tau_invariance <= 1e-10);
}
