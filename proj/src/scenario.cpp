#include "rmcf/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "rmcf/errors.hpp"

namespace rmcf {

namespace fs = std::filesystem;

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kExtinction: return "extinction";
    case Termination::kDomainError: return "domain_error";
  }
  return "unknown";
}

std::shared_ptr<const AmbientSoliton> build_soliton(const SolitonSpec& spec) {
  auto params = spec.params;
  params["dim"] = spec.dim;
  return make_soliton(spec.name, params);
}

namespace {

DiscreteCurve read_custom_curve(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read curve file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("curve file is not valid JSON: " + path);
  }
  if (!j.is_array()) throw ConfigError("curve file must hold a list of points");
  std::vector<Vec> pts;
  for (const auto& p : j) {
    if (!p.is_array() || static_cast<int>(p.size()) != dim)
      throw ConfigError("every curve point needs " + std::to_string(dim) + " coordinates");
    Vec v(dim);
    for (int a = 0; a < dim; ++a) {
      if (!p[a].is_number()) throw ConfigError("curve coordinates must be numbers");
      v(a) = p[a].get<double>();
    }
    pts.push_back(v);
  }
  return DiscreteCurve(std::move(pts));
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
  return out;
}

/// Multiplies the scaled coordinates of every vertex by `factor`.
DiscreteCurve scale_curve(const DiscreteCurve& curve, const AmbientSoliton& soliton, double factor) {
  const auto& scaled = soliton.scaled_coordinates();
  std::vector<Vec> pts = curve.vertices();
  for (auto& p : pts)
    for (int a = 0; a < p.size(); ++a)
      if (scaled[a]) p(a) *= factor;
  return DiscreteCurve(std::move(pts));
}

FlowSettings settings_from(const FlowSpec& spec) {
  FlowSettings s;
  s.cfl = spec.cfl;
  s.remesh_every = spec.remesh_every;
  s.extinction_length = spec.extinction_length;
  return s;
}

std::string csv_row(const TimeSeriesRecord& r) {
  std::string out;
  for (double v : {r.clock, r.weighted_volume, r.residual_integral, r.stone, r.type_one, r.max_defect,
                   r.f_at_marked, r.length}) {
    if (!out.empty()) out += ',';
    out += format_double(v);
  }
  return out;
}

std::string snapshot_line(const FlowState& state) {
  std::string out = "{\"clock\":" + format_double(state.clock) + ",\"vertices\":[";
  const auto& pts = state.curve.vertices();
  for (size_t i = 0; i < pts.size(); ++i) {
    out += i ? ",[" : "[";
    for (int a = 0; a < pts[i].size(); ++a) {
      if (a) out += ',';
      out += format_double(pts[i](a));
    }
    out += ']';
  }
  return out + "]}";
}

nlohmann::json estimate_json(const SingularTimeEstimate& e) {
  return {{"T_hat", e.T_hat}, {"t_lo", e.t_lo}, {"t_hi", e.t_hi}, {"fit_quality", e.fit_quality}};
}

}  // namespace

DiscreteCurve build_curve(const CurveSpec& spec, const AmbientSoliton& soliton) {
  DiscreteCurve c;
  if (spec.kind == "circle") {
    c = circle_curve(to_vec(spec.center), spec.radius, spec.N, spec.warp);
  } else if (spec.kind == "ellipse") {
    c = ellipse_curve(to_vec(spec.center), spec.a, spec.b, spec.N);
  } else if (spec.kind == "latitude") {
    c = latitude_curve(soliton, spec.theta0, spec.N, spec.axis, spec.height, spec.tilt);
  } else if (spec.kind == "custom") {
    c = read_custom_curve(spec.path, soliton.dim());
    for (const auto& v : c.vertices()) soliton.require_inside(v);
    if (c.size() != spec.N) c = resample_by_arclength(c, soliton, spec.N);
  } else {
    throw ConfigError("unknown curve kind '" + spec.kind + "'");
  }
  if (c.dim() != soliton.dim()) throw ConfigError("curve and soliton dimensions differ");
  for (const auto& v : c.vertices()) soliton.require_inside(v);
  return c;
}

SingularTimeEstimate estimate_horizon(const DiscreteCurve& physical_curve,
                                      std::shared_ptr<const AmbientSoliton> soliton,
                                      double pilot_dt, const FlowSettings& settings) {
  if (!(pilot_dt > 0.0)) throw ConfigError("pilot_dt must be positive");
  double Tp = 1.0;
  for (int attempt = 0; attempt < 30; ++attempt, Tp *= 2.0) {
    auto family = std::make_shared<RicciFlowFamily>(soliton, Tp);
    FlowState state =
        FlowState::unnormalized(scale_curve(physical_curve, *soliton, 1.0 / std::sqrt(Tp)), family, 0.0);
    CurveGeometry geom = compute_geometry(state.curve, *state.geometry());
    const double L0 = geom.length();
    std::vector<std::pair<double, double>> history{{0.0, geom.max_A()}};
    bool blew_up = false;
    for (long k = 1;; ++k) {
      const double t = k * pilot_dt;
      if (t > 0.95 * Tp) break;
      try {
        state = advance_to(state, t, settings);
      } catch (const ExtinctionSignal&) {
        blew_up = true;
        break;
      }
      geom = compute_geometry(state.curve, *state.geometry());
      history.emplace_back(t, geom.max_A());
      if (geom.length() < 0.1 * L0) {
        blew_up = true;
        break;
      }
    }
    if (!blew_up) {
      if (!(history.back().second > history.front().second * (1.0 + 1e-6) + 1e-8))
        throw NoBlowupSignal("pilot run: curvature does not grow");
      continue;
    }
    const size_t keep = std::max<size_t>(10, history.size() / 10);
    if (history.size() < keep) throw InputError("pilot_dt is too coarse for the singular-time fit");
    const std::vector<std::pair<double, double>> tail(history.end() - keep, history.end());
    return estimate_singular_time(tail);
  }
  throw NoBlowupSignal("pilot run found no singular time");
}

RunResult run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
  fs::create_directories(out_dir);
  RunResult res;
  auto& art = res.artifacts;
  art.series_csv_path = (fs::path(out_dir) / "series.csv").string();
  art.snapshots_jsonl_path = (fs::path(out_dir) / "snapshots.jsonl").string();
  art.audit_json_path = (fs::path(out_dir) / "audit.json").string();
  art.config_echo_path = (fs::path(out_dir) / "config.cfg").string();
  {
    std::ofstream echo(art.config_echo_path, std::ios::binary);
    echo << echo_config(config);
  }
  std::ofstream csv(art.series_csv_path, std::ios::binary);
  std::ofstream snaps(art.snapshots_jsonl_path, std::ios::binary);
  csv << "clock,weighted_volume,residual_integral,stone,type_one,max_defect,f_at_marked,length\n";

  const auto soliton = build_soliton(config.soliton);
  const DiscreteCurve curve0 = build_curve(config.curve, *soliton);
  const FlowSettings settings = settings_from(config.flow);
  const auto& fl = config.flow;
  const bool unnormalized = fl.kind == FlowKind::kUnnormalized;

  nlohmann::json& audit = res.audit;
  audit["scenario"] = config.source;
  audit["seed"] = config.seed;
  audit["flow"] = to_string(fl.kind);

  auto finish = [&]() {
    audit["termination"] = to_string(res.termination);
    if (!res.message.empty()) audit["message"] = res.message;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& a : res.audits) list.push_back(a.to_json());
    audit["audits"] = list;
    audit["passed"] = res.audits_passed;
    std::ofstream out(art.audit_json_path, std::ios::binary);
    out << audit.dump(2) << "\n";
  };

  DiscreteCurve start = curve0;
  if (fl.auto_T) {
    try {
      res.T_hat = estimate_horizon(curve0, soliton, fl.pilot_dt, settings);
    } catch (const DomainError& e) {
      res.termination = Termination::kDomainError;
      res.message = std::string("pilot: ") + e.what();
    } catch (const NoBlowupSignal& e) {
      res.termination = Termination::kDomainError;
      res.message = std::string("pilot: ") + e.what();
    } catch (const StepSizeError& e) {
      res.termination = Termination::kDomainError;
      res.message = std::string("pilot: ") + e.what();
    }
    if (res.termination == Termination::kDomainError) {
      finish();
      return res;
    }
    res.horizon = res.T_hat->T_hat;
    audit["singular_time"] = estimate_json(*res.T_hat);
    start = scale_curve(curve0, *soliton, 1.0 / std::sqrt(res.horizon));
  } else {
    res.horizon = fl.T;
  }
  audit["horizon"] = res.horizon;
  auto family = std::make_shared<RicciFlowFamily>(soliton, res.horizon);

  double begin, end;
  if (unnormalized) {
    begin = 0.0;
    end = fl.end_mode == EndMode::kRelative ? fl.end * res.horizon : fl.end;
    if (!(end < res.horizon)) throw ConfigError("flow.t_end must lie before the singular time");
  } else {
    begin = -std::log(res.horizon);
    end = fl.end_mode == EndMode::kRelative ? begin + fl.end : fl.end;
    if (!(end > begin)) throw ConfigError("flow.s_end must exceed -log T");
  }
  FlowState state = unnormalized ? FlowState::unnormalized(start, family, begin)
                                 : FlowState::normalized(start, family, begin);

  const int marked = config.diagnostics.marked_vertex;
  double last_recorded = std::nan("");
  auto record = [&](const FlowState& s) {
    const TimeSeriesRecord r = make_record(s, marked);
    res.series.push_back(r);
    csv << csv_row(r) << '\n';
    snaps << snapshot_line(s) << '\n';
    last_recorded = s.clock;
  };

  const long n_steps = std::max(1L, static_cast<long>(std::ceil((end - begin) / fl.dt - 1e-9)));
  try {
    record(state);
    for (long k = 1; k <= n_steps; ++k) {
      const double target = k == n_steps ? end : begin + k * fl.dt;
      try {
        state = advance_to(state, target, settings);
      } catch (const ExtinctionSignal& e) {
        res.termination = Termination::kExtinction;
        res.message = e.what();
        audit["extinction"] = {{"clock", e.clock()}, {"length", e.length()}};
        break;
      }
      if (k % config.output.snapshot_every == 0 || k == n_steps) record(state);
    }
    if (res.termination == Termination::kExtinction && state.clock != last_recorded) record(state);
  } catch (const DomainError& e) {
    res.termination = Termination::kDomainError;
    res.message = e.what();
  } catch (const StepSizeError& e) {
    res.termination = Termination::kDomainError;
    res.message = e.what();
  }
  audit["steps"] = state.step_count;
  audit["final_clock"] = state.clock;
  audit["records"] = res.series.size();

  const auto& dg = config.diagnostics;
  if (dg.audit_monotonicity && res.series.size() >= 3) {
    MonotonicityOptions opt;
    opt.unnormalized_clock = unnormalized;
    opt.horizon = res.horizon;
    opt.slack = dg.monotonicity_slack;
    opt.derivative_tolerance = dg.derivative_tolerance;
    opt.derivative_floor = dg.derivative_floor;
    opt.c_prime = dg.c_prime.value_or(-1.0);
    res.audits.push_back(monotonicity_audit(res.series, opt));
  }
  if (dg.stone_bound) {
    AuditReport rep;
    rep.name = "stone_bound";
    double worst = 0.0;
    for (const auto& r : res.series) {
      worst = std::max(worst, r.stone);
      if (r.stone > *dg.stone_bound) {
        rep.passed = false;
        rep.failures.push_back("stone " + format_double(r.stone) + " at clock " + format_double(r.clock));
      }
    }
    rep.details = {{"bound", *dg.stone_bound}, {"max_stone", worst}};
    res.audits.push_back(rep);
  }

  std::vector<double> marked_f;
  double max_type_one = 0.0, max_defect = 0.0;
  for (const auto& r : res.series) {
    marked_f.push_back(r.f_at_marked);
    max_type_one = std::max(max_type_one, r.type_one);
    max_defect = std::max(max_defect, r.max_defect);
  }
  const B2Report b2 = b2_boundedness_monitor(marked_f, dg.b2_bound);
  audit["monitors"] = {
      {"b2", {{"sup_f", b2.sup_f}, {"bound", b2.bound}, {"divergent", b2.divergent}}},
      {"max_type_one", max_type_one},
      {"max_defect", max_defect},
  };

  for (const auto& a : res.audits) res.audits_passed = res.audits_passed && a.passed;
  finish();
  return res;
}

int exit_code(const RunResult& result, bool strict) {
  if (result.termination == Termination::kDomainError) return 3;
  if (strict && !result.audits_passed) return 1;
  return 0;
}

std::vector<BatchOutcome> run_batch(const std::vector<BatchItem>& items, int jobs, bool strict) {
  std::vector<BatchOutcome> out(items.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < items.size(); i = next++) {
      try {
        out[i].result = run_scenario(items[i].config, items[i].out_dir);
        out[i].exit_code = exit_code(*out[i].result, strict);
      } catch (const ConfigError& e) {
        out[i].exit_code = 2;
        out[i].error = e.what();
      } catch (const std::exception& e) {
        out[i].exit_code = 3;
        out[i].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------

double IdentityReport::max_analytic() const {
  return std::max({soliton_equation, normalization, family_soliton_equation, family_normalization});
}

double IdentityReport::max_fd() const { return std::max(ricci_flow, conjugate_heat); }

nlohmann::json IdentityReport::to_json() const {
  return {{"soliton", soliton},
          {"samples", samples},
          {"seed", seed},
          {"soliton_equation", soliton_equation},
          {"normalization", normalization},
          {"family_soliton_equation", family_soliton_equation},
          {"family_normalization", family_normalization},
          {"ricci_flow", ricci_flow},
          {"conjugate_heat", conjugate_heat},
          {"analytic_tolerance", analytic_tolerance},
          {"fd_tolerance", fd_tolerance},
          {"passed", passed}};
}

IdentityReport check_identities(const std::string& name, int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("samples must be at least 1");
  const auto soliton = make_soliton(name, {});
  const RicciFlowFamily family(soliton, 1.0);
  const Chart& chart = soliton->chart();
  const int n = soliton->dim();

  IdentityReport rep;
  rep.soliton = name;
  rep.samples = samples;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  for (int k = 0; k < samples; ++k) {
    Vec x(n);
    for (int a = 0; a < n; ++a) {
      const Coordinate& c = chart.coordinate(a);
      switch (c.kind) {
        case CoordinateKind::kLine: x(a) = pick(-3.0, 3.0); break;
        case CoordinateKind::kInterval: {
          const double pad = 0.05 * (c.hi - c.lo);
          x(a) = pick(c.lo + pad, c.hi - pad);
          break;
        }
        case CoordinateKind::kPeriodic: x(a) = pick(c.lo, c.hi); break;
      }
    }
    const double t = pick(0.0, 0.9);
    const auto [se, nz] = identity_residuals(*soliton, x);
    rep.soliton_equation = std::max(rep.soliton_equation, se);
    rep.normalization = std::max(rep.normalization, nz);
    const FamilyResiduals fr = family_residuals(family, x, t, 3e-4 * family.tau(t));
    rep.family_soliton_equation = std::max(rep.family_soliton_equation, fr.soliton_equation);
    rep.family_normalization = std::max(rep.family_normalization, fr.normalization);
    rep.ricci_flow = std::max(rep.ricci_flow, fr.ricci_flow);
    rep.conjugate_heat = std::max(rep.conjugate_heat, fr.conjugate_heat);
  }
  rep.passed = rep.max_analytic() <= rep.analytic_tolerance && rep.max_fd() <= rep.fd_tolerance;
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json VariationReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"direction", r.direction},
                         {"eps", r.eps},
                         {"rel_error", r.rel_error},
                         {"rhs", r.rhs},
                         {"fd", r.fd},
                         {"best_error", r.best_error},
                         {"passed", r.passed}});
  return {{"rows", rows_json},
          {"tolerance", tolerance},
          {"monotonicity", {{"rhs", monotonicity_rhs},
                            {"expected", monotonicity_expected},
                            {"rel_error", monotonicity_rel_error}}},
          {"tau_invariance", tau_invariance},
          {"passed", passed}};
}

namespace {

/// Seeded low-frequency direction at the base curve.
VariationData random_direction(std::mt19937_64& rng, const DiscreteCurve& curve,
                               const std::vector<double>& u, const RicciFlowFamily& family) {
  const int N = curve.size(), n = curve.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  constexpr int kModes = 3;

  VariationData v;
  std::vector<double> wc(2 * kModes + 1);
  for (int k = 0; k <= 2 * kModes; ++k) wc[k] = 0.3 * normal(rng) / (1 + k / 2);
  std::vector<std::vector<double>> vc(n, std::vector<double>(2 * kModes + 1));
  for (auto& row : vc)
    for (int k = 0; k <= 2 * kModes; ++k) row[k] = 0.1 * normal(rng) / (1 + k / 2);
  auto series = [&](const std::vector<double>& c, double p) {
    double s = c[0];
    for (int k = 1; k <= kModes; ++k)
      s += c[2 * k - 1] * std::cos(2 * M_PI * k * p) + c[2 * k] * std::sin(2 * M_PI * k * p);
    return s;
  };
  v.w.resize(N);
  v.V.resize(N);
  for (int i = 0; i < N; ++i) {
    const double p = static_cast<double>(i) / N;
    v.w[i] = u[i] * series(wc, p);
    v.V[i] = Vec(n);
    for (int a = 0; a < n; ++a) v.V[i](a) = series(vc[a], p);
  }

  std::vector<double> kc(n), kp(n);
  for (int a = 0; a < n; ++a) {
    kc[a] = 0.3 * normal(rng);
    kp[a] = phase(rng);
  }
  const double k0 = 0.3 * normal(rng);
  v.k = [&family, kc, kp, k0](const Vec& x) {
    double s = k0;
    for (int a = 0; a < x.size(); ++a) s += kc[a] * std::sin(x(a) + kp[a]);
    return family.density_at(x, 0.0) * s;
  };

  Mat S = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) S(a, b) = S(b, a) = 0.2 * normal(rng);
  Vec beta(n);
  for (int a = 0; a < n; ++a) beta(a) = normal(rng);
  const double gamma = phase(rng);
  v.h = [S, beta, gamma](const Vec& x) -> Mat { return S * (1.0 + 0.5 * std::sin(beta.dot(x) + gamma)); };
  return v;
}

}  // namespace

VariationReport variation_test(const ScenarioConfig& config, int directions,
                               const std::vector<double>& eps_ladder) {
  if (directions < 1) throw ConfigError("directions must be at least 1");
  if (eps_ladder.empty()) throw ConfigError("eps ladder must not be empty");
  const auto soliton = build_soliton(config.soliton);
  if (config.flow.auto_T) throw ConfigError("variation test needs an explicit flow.T");
  const double T = config.flow.T;
  const auto family = std::make_shared<RicciFlowFamily>(soliton, T);
  const DiscreteCurve curve = build_curve(config.curve, *soliton);
  const auto g0 = family->slice(0.0);
  const int N = curve.size(), n = curve.dim();
  const double tau = family->tau(0.0);

  const std::vector<double> u(N, std::pow(4.0 * M_PI * tau, 0.5 * (n - 1)));
  const DensityField rho_jet = [&](const Vec& x) { return family->density_jet(x, 0.0); };
  const ScalarField rho = [&](const Vec& x) { return family->density_at(x, 0.0); };

  VariationReport rep;
  std::mt19937_64 rng(config.seed);
  bool all = true;
  for (int d = 0; d < directions; ++d) {
    const VariationData v = d == 0 ? VariationData::zero(N, n) : random_direction(rng, curve, u, *family);
    VariationRow row;
    row.direction = d;
    row.rhs = first_variation_rhs(u, curve, *g0, rho_jet, v, tau);
    const double rhs_other = first_variation_rhs(u, curve, *g0, rho_jet, v, 0.37 * tau);
    rep.tau_invariance = std::max(rep.tau_invariance, std::abs(row.rhs - rhs_other));
    row.best_error = std::numeric_limits<double>::infinity();
    for (double eps0 : eps_ladder) {
      double eps = eps0, fd = 0.0;
      for (;;) {
        try {
          fd = finite_difference_variation(u, curve, *g0, rho, v, eps);
          break;
        } catch (const DomainError&) {
          eps /= 10.0;
          if (eps < 1e-7) throw DomainError("perturbed metric degenerate for every eps");
        }
      }
      const double err = std::abs(row.rhs - fd) / std::max(1.0, std::abs(fd));
      row.eps.push_back(eps);
      row.rel_error.push_back(err);
      if (err < row.best_error) {
        row.best_error = err;
        row.fd = fd;
      }
    }
    row.passed = row.best_error <= rep.tolerance;
    all = all && row.passed;
    rep.rows.push_back(row);
  }

  // Direction of the flow: u_t, ∂_t F = H, ∂_t ρ = −Δρ + Rρ, ∂_t g = −2 Ric.
  const CurveGeometry geom = compute_geometry(curve, *g0);
  VariationData flow;
  flow.w.resize(N);
  for (int i = 0; i < N; ++i) flow.w[i] = -(n - 1) / (2.0 * tau) * u[i];
  flow.V = geom.H;
  flow.k = [&](const Vec& x) {
    const MetricJet j = family->jet(x, 0.0, 2);
    const CurvatureData cd = curvature(j);
    const ScalarJet r = family->density_jet(x, 0.0);
    return -laplacian(cd.g_inv, cd.gamma, r) + cd.scalar * r.value;
  };
  flow.h = [&](const Vec& x) -> Mat { return -2.0 * curvature(family->jet(x, 0.0, 2)).ricci; };
  rep.monotonicity_rhs = first_variation_rhs(u, curve, *g0, rho_jet, flow, tau);
  for (int i = 0; i < N; ++i) {
    const Vec& d = geom.shrinker_defect[i];
    rep.monotonicity_expected -=
        u[i] * inner(geom.metric[i], d, d) * rho(geom.position[i]) * geom.measure_weight[i];
  }
  rep.monotonicity_rel_error = std::abs(rep.monotonicity_rhs - rep.monotonicity_expected) /
                               std::max(std::abs(rep.monotonicity_expected), 1e-300);
  rep.passed = all && rep.monotonicity_rel_error <= 0.01 && rep.tau_invariance <= 1e-10;
  return rep;
}

}  // namespace rmcf
