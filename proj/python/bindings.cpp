#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmcf/errors.hpp"
#include "rmcf/scenario.hpp"
#include "rmcf/version.hpp"

namespace py = pybind11;

namespace {

// Results cross the boundary as JSON text; the Python package decodes them.
std::string run_json(const std::string& config_path, const std::string& out_dir, bool strict) {
  const rmcf::ScenarioConfig config = rmcf::load_config(config_path);
  rmcf::RunResult r;
  {
    py::gil_scoped_release release;
    r = rmcf::run_scenario(config, out_dir);
  }
  nlohmann::json j;
  j["termination"] = rmcf::to_string(r.termination);
  j["message"] = r.message;
  j["horizon"] = r.horizon;
  j["audits_passed"] = r.audits_passed;
  j["exit_code"] = rmcf::exit_code(r, strict);
  j["artifacts"] = {{"series_csv", r.artifacts.series_csv_path},
                    {"snapshots_jsonl", r.artifacts.snapshots_jsonl_path},
                    {"audit_json", r.artifacts.audit_json_path},
                    {"config_echo", r.artifacts.config_echo_path}};
  j["audit"] = r.audit;
  nlohmann::json cols = nlohmann::json::object();
  for (const char* c : {"clock", "weighted_volume", "residual_integral", "stone", "type_one", "max_defect",
                        "f_at_marked", "length"})
    cols[c] = nlohmann::json::array();
  for (const auto& rec : r.series) {
    cols["clock"].push_back(rec.clock);
    cols["weighted_volume"].push_back(rec.weighted_volume);
    cols["residual_integral"].push_back(rec.residual_integral);
    cols["stone"].push_back(rec.stone);
    cols["type_one"].push_back(rec.type_one);
    cols["max_defect"].push_back(rec.max_defect);
    cols["f_at_marked"].push_back(rec.f_at_marked);
    cols["length"].push_back(rec.length);
  }
  j["series"] = cols;
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_rmcf, m) {
  m.doc() = "Ricci-mean curvature flow of curves in shrinking soliton backgrounds.";

  auto base = py::register_exception<rmcf::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<rmcf::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<rmcf::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<rmcf::InputError>(m, "InputError", base.ptr());

  m.attr("__version__") = rmcf::kVersion;

  m.def("check_identities",
        [](const std::string& soliton, int samples, std::uint64_t seed) {
          return rmcf::check_identities(soliton, samples, seed).to_json().dump();
        },
        py::arg("soliton"), py::arg("samples") = 1000, py::arg("seed") = 1);

  m.def("identity_residuals",
        [](const std::string& soliton, const std::vector<double>& point) {
          auto s = rmcf::make_soliton(soliton, {});
          if (static_cast<int>(point.size()) != s->dim())
            throw rmcf::ConfigError("point needs " + std::to_string(s->dim()) + " coordinates");
          rmcf::Vec p(s->dim());
          for (int i = 0; i < s->dim(); ++i) p(i) = point[i];
          return rmcf::identity_residuals(*s, p);
        },
        py::arg("soliton"), py::arg("point"),
        "(max |Ric + Hess f - g/2|, |R + |grad f|^2 - f|) at a chart point.");

  m.def("echo_config", [](const std::string& path) { return rmcf::echo_config(rmcf::load_config(path)); },
        py::arg("path"));

  m.def("run_scenario", &run_json, py::arg("config_path"), py::arg("out_dir"), py::arg("strict") = false);

  m.def("variation_test",
        [](const std::string& config_path, int directions) {
          return rmcf::variation_test(rmcf::load_config(config_path), directions).to_json().dump();
        },
        py::arg("config_path"), py::arg("directions") = 20);
}
