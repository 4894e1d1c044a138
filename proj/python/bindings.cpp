// Python bindings. Structured values cross the boundary as JSON text; the
// package wrapper in nsbandit/__init__.py turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "nsbandit/assumptions.hpp"
#include "nsbandit/env_io.hpp"
#include "nsbandit/errors.hpp"
#include "nsbandit/experiment.hpp"
#include "nsbandit/params.hpp"
#include "nsbandit/prudent.hpp"
#include "nsbandit/selective.hpp"

namespace py = pybind11;
using namespace nsbandit;
using nlohmann::json;

namespace {

json trace_summary(const RunTrace& trace) {
  json pulls = json::array();
  for (const auto& p : trace.pulls) pulls.push_back({p.t, p.arm, p.reward, p.regret, p.round, p.episode});
  json detections = json::array();
  for (const auto& d : trace.detections)
    detections.push_back({{"round", d.round}, {"time", d.time}, {"arm", d.arm}, {"u", d.u}, {"v", d.v},
                          {"u2", d.u2}, {"v2", d.v2}, {"threshold", d.threshold}});
  json episodes = json::array();
  for (const auto& e : trace.episodes) episodes.push_back({{"episode", e.episode}, {"round", e.round}, {"time", e.time}});
  return {{"policy", trace.policy},
          {"seed", trace.seed},
          {"params", trace.params},
          {"total_regret", trace.total_regret},
          {"forced_progress", trace.forced_progress},
          {"pulls", pulls},
          {"detections", detections},
          {"episodes", episodes}};
}

std::string derive(char tag, const json& a) {
  CaseParams p;
  switch (tag) {
    case 'a': p = params_case_a(a.at("M").get<std::int64_t>()); break;
    case 'b':
      p = params_case_b(a.at("M_star"), a.at("gamma_star"), a.at("u_star"), a.at("K"), a.at("T"));
      break;
    case 'c': p = params_case_c(a.at("M_star"), a.at("alpha"), a.at("K"), a.at("T")); break;
    case 'd': p = params_case_d(a.at("upsilon_star"), a.at("B_star"), a.at("K"), a.at("T")); break;
    default: throw InputError(std::string("unknown case '") + tag + "'");
  }
  return p.to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_nsbandit, m) {
  m.doc() = "Non-stationary bandit simulations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ModeError>(m, "ModeError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("generate_environment", [](const std::string& request) {
    return to_json(generate_environment(json::parse(request))).dump();
  });

  m.def(
      "run_prudent",
      [](const std::string& env, int M, double B_star, std::uint64_t seed, const std::string& scan_mode) {
        PrudentParams p;
        p.M = M;
        p.B_star = B_star;
        p.scan_mode = scan_mode == "exhaustive" ? ScanMode::exhaustive : ScanMode::geometric_grid;
        py::gil_scoped_release release;
        return trace_summary(run_prudent(environment_from_json(json::parse(env)), p, NoiseStream(seed))).dump();
      },
      py::arg("env"), py::arg("M") = 1, py::arg("B_star") = 0.0, py::arg("seed") = 0,
      py::arg("scan_mode") = "geometric_grid");

  m.def(
      "run_selective",
      [](const std::string& env, double B_star, std::uint64_t seed) {
        SelectiveParams p;
        p.B_star = B_star;
        py::gil_scoped_release release;
        return trace_summary(run_selective(environment_from_json(json::parse(env)), p, NoiseStream(seed))).dump();
      },
      py::arg("env"), py::arg("B_star") = 0.0, py::arg("seed") = 0);

  m.def("derive_params", [](const std::string& which, const std::string& args) {
    if (which.size() != 1) throw InputError("case must be one of a, b, c, d");
    return derive(which[0], json::parse(args));
  });

  m.def(
      "validate_environment",
      [](const std::string& env, double B_star, std::vector<Step> change_points) {
        const auto spec = environment_from_json(json::parse(env));
        if (change_points.empty()) change_points = {1, spec.horizon() + 1};
        return to_json(validate_assumptions(spec, change_points, B_star)).dump();
      },
      py::arg("env"), py::arg("B_star"), py::arg("change_points") = std::vector<Step>{});

  m.def("minimal_partition", [](const std::string& env, double B_star) {
    return to_json(minimal_significant_partition(environment_from_json(json::parse(env)), B_star)).dump();
  });

  m.def(
      "run_experiment",
      [](const std::string& config, const std::string& base_dir) {
        const RunConfig cfg = parse_run_config(json::parse(config), base_dir);
        py::gil_scoped_release release;
        return report_json(run_experiment(cfg)).dump();
      },
      py::arg("config"), py::arg("base_dir") = ".");
}
