// Command-line front end: run experiments, derive case parameters, validate
// and generate environments. Exit codes: 0 success, 2 invalid input or a
// failed validation, 1 anything else.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsbandit/assumptions.hpp"
#include "nsbandit/env_io.hpp"
#include "nsbandit/errors.hpp"
#include "nsbandit/experiment.hpp"
#include "nsbandit/params.hpp"

using namespace nsbandit;
using nlohmann::json;

namespace {

constexpr int kValidationFailure = 2;

// "0,0.5;0.5,0" -> {{0, 0.5}, {0.5, 0}}. Rows may also be split by '/',
// which needs no shell or CMake quoting.
std::vector<std::vector<double>> parse_rows(std::string text) {
  std::replace(text.begin(), text.end(), '/', ';');
  std::vector<std::vector<double>> rows;
  std::stringstream all(text);
  std::string row;
  while (std::getline(all, row, ';')) {
    std::vector<double> values;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw InputError("bad number '" + cell + "' in gap rows");
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

struct CaseArgs {
  std::string which;
  int K = 2;
  Step T = 1000;
  std::int64_t M = 1, M_star = 1, upsilon_star = 1;
  int gamma_star = 0;
  double u_star = 1.0, alpha = 1.0, B_star = 0.0;
};

void add_case_options(CLI::App* cmd, CaseArgs& a) {
  cmd->add_option("--case", a.which, "structural case")->required()->check(CLI::IsMember({"a", "b", "c", "d"}));
  cmd->add_option("--K", a.K, "number of arms");
  cmd->add_option("-T,--T", a.T, "horizon");
  cmd->add_option("--M", a.M, "case a: number of stationary intervals");
  cmd->add_option("--M-star", a.M_star, "cases b, c: number of smooth pieces");
  cmd->add_option("--gamma-star", a.gamma_star, "case b: maximal degree");
  cmd->add_option("--u-star", a.u_star, "case b: coefficient norm bound");
  cmd->add_option("--alpha", a.alpha, "case c: Holder exponent");
  cmd->add_option("--upsilon-star", a.upsilon_star, "case d: monotone pieces per arm");
  cmd->add_option("--bstar", a.B_star, "case d: drift budget B*");
}

int derive_params(const CaseArgs& a, std::optional<double> C) {
  CaseParams p = a.which == "a"   ? params_case_a(a.M)
                 : a.which == "b" ? params_case_b(a.M_star, a.gamma_star, a.u_star, a.K, a.T)
                 : a.which == "c" ? params_case_c(a.M_star, a.alpha, a.K, a.T)
                                  : params_case_d(a.upsilon_star, a.B_star, a.K, a.T);
  json out = p.to_json();
  if (C) {
    out["bound_prudent"] = regret_bound_prudent(static_cast<double>(p.M), p.B_star, a.K, a.T, *C);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int validate_env(const std::string& path, double B_star, const std::vector<Step>& partition, double ratio,
                 bool full) {
  const EnvironmentSpec env = load_environment(path);
  AssumptionOptions opts;
  opts.ratio_bound = ratio;
  std::vector<Step> cps = partition;
  std::string source = "given";
  if (cps.empty()) {
    if (env.info() && !env.info()->change_points.empty()) {
      cps = env.info()->change_points;
      source = "recorded";
    } else {
      cps = {1, env.horizon() + 1};
      source = "single_interval";
    }
  }
  const PartitionReport checked = validate_assumptions(env, cps, B_star, opts);
  const PartitionReport minimal = minimal_significant_partition(env, B_star, opts);
  json out = {{"partition_source", source},
              {"ratio_bound", ratio},
              {"checked", to_json(checked, full)},
              {"minimal", {{"M", minimal.num_intervals()}, {"change_points", minimal.change_points}}}};
  std::cout << out.dump(2) << '\n';
  return checked.ok ? 0 : kValidationFailure;
}

int gen_env(const CaseArgs& a, std::uint64_t seed, const std::string& gaps, const std::vector<Step>& change_points,
            const std::string& noise, double sigma, const std::string& mode, const std::string& out) {
  json req = {{"case", a.which}, {"K", a.K}, {"T", a.T}, {"seed", seed}, {"noise", {{"kind", noise}, {"sigma", sigma}}},
              {"mode", mode}};
  if (a.which == "a") {
    req["M"] = a.M;
    if (gaps.empty()) throw InputError("case a needs --gaps");
    req["gaps"] = parse_rows(gaps);
    if (!change_points.empty()) req["change_points"] = change_points;
  } else if (a.which == "b") {
    req.update({{"M_star", a.M_star}, {"gamma_star", a.gamma_star}, {"u_star", a.u_star}});
  } else if (a.which == "c") {
    req.update({{"M_star", a.M_star}, {"alpha", a.alpha}});
  } else {
    req.update({{"upsilon_star", a.upsilon_star}, {"B_star", a.B_star}});
  }
  const EnvironmentSpec env = generate_environment(req);
  if (out.empty()) {
    std::cout << to_json(env).dump(2) << '\n';
  } else {
    save_environment(env, out);
    std::cerr << "wrote " << out << " (hash " << environment_hash(env) << ")\n";
  }
  return 0;
}

int run(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path);
  const RunReport report = run_experiment(cfg);
  json out = report_json(report);
  out.erase("seeds");
  out.erase("bound_curve");
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-stationary bandit simulations"};
  app.require_subcommand(1);

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "run a seed batch described by a JSON config");
  run_cmd->add_option("--config", config, "config file")->required();

  CaseArgs derive;
  std::optional<double> bound_C;
  auto* derive_cmd = app.add_subcommand("derive-params", "print M and B* for a structural case as JSON");
  add_case_options(derive_cmd, derive);
  derive_cmd->add_option("--bound-C", bound_C, "also evaluate the prudent regret bound with this constant");

  std::string spec;
  double bstar = 0.0, ratio = std::pow(2.0, 0.25);
  std::vector<Step> partition;
  bool full = false;
  auto* validate_cmd = app.add_subcommand("validate-env", "check the structural assumptions on an environment");
  validate_cmd->add_option("--spec", spec, "environment JSON")->required();
  validate_cmd->add_option("--bstar", bstar, "drift budget B*")->required();
  validate_cmd->add_option("--partition", partition, "change points 1 < ... < T+1 (default: recorded ones)")
      ->delimiter(',');
  validate_cmd->add_option("--ratio", ratio, "allowed gap ratio inside an interval");
  validate_cmd->add_flag("--full", full, "print evidence for every (arm, interval)");

  CaseArgs gen;
  std::uint64_t seed = 0;
  std::string gaps, noise = "none", mode = "mean", out;
  double sigma = 0.0;
  std::vector<Step> change_points;
  auto* gen_cmd = app.add_subcommand("gen-env", "generate a case a-d environment");
  add_case_options(gen_cmd, gen);
  gen_cmd->add_option("--seed", seed, "generator seed");
  gen_cmd->add_option("--gaps", gaps, "case a: gap rows, e.g. \"0,0.5;0.5,0\" or 0,0.5/0.5,0");
  gen_cmd->add_option("--change-points", change_points, "case a: interior change points")->delimiter(',');
  gen_cmd->add_option("--noise", noise, "none | bernoulli | truncated_gaussian");
  gen_cmd->add_option("--sigma", sigma, "truncated_gaussian scale");
  gen_cmd->add_option("--mode", mode, "mean | gap");
  gen_cmd->add_option("-o,--out", out, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationFailure;
  }

  try {
    if (*run_cmd) return run(config);
    if (*derive_cmd) return derive_params(derive, bound_C);
    if (*validate_cmd) return validate_env(spec, bstar, partition, ratio, full);
    if (*gen_cmd) return gen_env(gen, seed, gaps, change_points, noise, sigma, mode, out);
  } catch (const std::invalid_argument& e) {  // InputError, ModeError
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
