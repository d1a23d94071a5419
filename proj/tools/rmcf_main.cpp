#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rmcf/errors.hpp"
#include "rmcf/scenario.hpp"
#include "rmcf/version.hpp"

namespace {

int run_command(const std::vector<std::string>& configs, std::string out, bool strict, int jobs) {
  std::vector<rmcf::BatchItem> items;
  for (const auto& path : configs) {
    rmcf::ScenarioConfig cfg = rmcf::load_config(path);
    std::string dir = out.empty() ? cfg.output.directory : out;
    if (dir.empty()) throw rmcf::ConfigError("no output directory: pass --out or set output.directory");
    if (configs.size() > 1) dir = (std::filesystem::path(dir) / std::filesystem::path(path).stem()).string();
    items.push_back({std::move(cfg), dir});
  }
  const auto outcomes = rmcf::run_batch(items, jobs, strict);
  int code = 0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.result) {
      const auto& r = *o.result;
      std::printf("%s: %s, %zu records, audits %s -> %s\n", configs[i].c_str(), rmcf::to_string(r.termination),
                  r.series.size(), r.audits_passed ? "passed" : "FAILED", items[i].out_dir.c_str());
      if (!r.message.empty()) std::printf("  %s\n", r.message.c_str());
      for (const auto& a : r.audits)
        for (const auto& f : a.failures) std::printf("  %s: %s\n", a.name.c_str(), f.c_str());
    } else {
      std::fprintf(stderr, "%s: error: %s\n", configs[i].c_str(), o.error.c_str());
    }
    code = std::max(code, o.exit_code);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ricci-mean-curvature flow of curves in shrinking soliton backgrounds"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run scenario configs and write artifacts");
  std::vector<std::string> configs;
  std::string out;
  bool strict = false;
  int jobs = 1;
  run->add_option("--config", configs, "scenario config file(s)")->required()->expected(1, -1);
  run->add_option("--out", out, "output directory (one subdirectory per config when several are given)");
  run->add_flag("--strict", strict, "exit with code 1 when an audit fails");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* ident = app.add_subcommand("check-identities", "soliton and Ricci flow identity residuals");
  std::string soliton;
  int samples = 1000;
  std::uint64_t seed = 0;
  ident->add_option("--soliton", soliton, "gaussian, sphere or cylinder")->required();
  ident->add_option("--samples", samples, "random sample points")->check(CLI::PositiveNumber);
  ident->add_option("--seed", seed, "random seed");

  auto* var = app.add_subcommand("variation-test", "first variation formula against finite differences");
  std::string var_config;
  int directions = 20;
  std::vector<double> eps{1e-3, 1e-4, 1e-5};
  var->add_option("--config", var_config, "base config")->required();
  var->add_option("--directions", directions, "number of directions (the first is zero)")
      ->check(CLI::PositiveNumber);
  var->add_option("--eps", eps, "eps ladder");

  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_command(configs, out, strict, jobs);
    if (*ident) {
      const rmcf::IdentityReport rep = rmcf::check_identities(soliton, samples, seed);
      std::cout << rep.to_json().dump(2) << "\n";
      return rep.passed ? 0 : 1;
    }
    if (*var) {
      const rmcf::VariationReport rep = rmcf::variation_test(rmcf::load_config(var_config), directions, eps);
      for (const auto& row : rep.rows)
        std::printf("direction %2d  best rel error %.3e  %s\n", row.direction, row.best_error,
                    row.passed ? "ok" : "FAIL");
      std::printf("flow direction  rhs %.10g  expected %.10g  rel error %.3e\n", rep.monotonicity_rhs,
                  rep.monotonicity_expected, rep.monotonicity_rel_error);
      std::printf("tau invariance  %.3e\n", rep.tau_invariance);
      std::printf("%s\n", rep.passed ? "PASS" : "FAIL");
      return rep.passed ? 0 : 1;
    }
    std::printf("rmcf %s\n", rmcf::kVersion);
    return 0;
  } catch (const rmcf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const rmcf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
