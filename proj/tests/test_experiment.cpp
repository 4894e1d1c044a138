#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nsbandit/baselines.hpp"
#include "nsbandit/env_io.hpp"
#include "nsbandit/errors.hpp"
#include "nsbandit/experiment.hpp"

using namespace nsbandit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json stationary_spec() {
  return to_json(EnvironmentSpec(100, {MeanFunction::constant(0.9), MeanFunction::constant(0.4)}));
}

json config(const std::string& policy, json env = {{"spec", stationary_spec()}}) {
  return {{"schema_version", 1}, {"environment", env}, {"policy", policy}, {"params", {{"M", 1}}}, {"seeds", {1, 2, 3}}};
}

SeedRecord record(double final_regret, std::vector<double> cum) {
  SeedRecord r;
  r.final_regret = final_regret;
  for (std::size_t i = 0; i < cum.size(); ++i) r.trajectory.push_back({static_cast<Step>(i + 1), cum[i], 1, 0});
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nsbandit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("baseline and prudent regret on the stationary example") {
  const auto oracle = run_experiment(parse_run_config(config("oracle")));
  for (const auto& s : oracle.seeds) {
    CHECK(s.final_regret == 0.0);
    for (const auto& p : s.trajectory) CHECK(p.cum_regret == 0.0);
  }
  CHECK(run_experiment(parse_run_config(config("uniform"))).summary.mean == 25.0);
  const auto prudent = run_experiment(parse_run_config(config("prudent")));
  CHECK(prudent.summary.mean == 25.0);
  CHECK(prudent.summary.iqr == 0.0);
  CHECK(prudent.summary.runs_with_detection == 0);
  CHECK_FALSE(prudent.bound_curve.empty());
}

TEST_CASE("oracle policy follows the best arm through changes") {
  const EnvironmentSpec env(200, {MeanFunction({{1, {0.9}}, {101, {0.1}}}), MeanFunction::constant(0.5)},
                            {NoiseKind::bernoulli, 0.0});
  const auto trace = run_oracle(env, NoiseStream(3));
  CHECK(trace.total_regret == 0.0);
  CHECK(trace.pulls[99].arm == 1);
  CHECK(trace.pulls[100].arm == 2);
}

TEST_CASE("aggregation") {
  SUBCASE("single record is returned as is") {
    const auto s = aggregate({record(7.5, {1.0, 7.5})});
    CHECK(s.runs == 1);
    CHECK(s.mean == 7.5);
    CHECK(s.median == 7.5);
    CHECK(s.iqr == 0.0);
    CHECK_FALSE(s.mean_detection_delay.has_value());
  }
  SUBCASE("three runs, by hand") {
    auto a = record(3.0, {1.0, 3.0}), b = record(6.0, {2.0, 6.0}), c = record(12.0, {4.0, 12.0});
    a.detection_times = {5};
    a.detection_delays = {2};
    c.detection_times = {9, 40};
    c.detection_delays = {6};
    c.false_alarms = 1;
    const auto s = aggregate({a, b, c});
    CHECK(s.mean == 7.0);
    CHECK(s.median == 6.0);
    CHECK(s.q1 == 4.5);
    CHECK(s.q3 == 9.0);
    CHECK(s.iqr == 4.5);
    CHECK(s.runs_with_detection == 2);
    CHECK(s.false_alarms == 1);
    CHECK(*s.mean_detection_delay == 4.0);
  }
  CHECK_THROWS_AS(aggregate({}), InputError);
}

TEST_CASE("detection scoring") {
  RunTrace trace;
  trace.episodes = {{1, 1, 1}};
  for (Step t = 1; t <= 100; ++t) trace.pulls.push_back({t, 1, 0.0, 0.0, static_cast<int>(t), 1});
  for (Step d : {20, 45, 50, 90}) {
    DetectionEvent ev;
    ev.time = d;
    trace.detections.push_back(ev);
  }
  const auto rec = summarize_trace(trace, {40, 60, 80}, 10);
  // 20: before any change; 45 matches 40; 50: 40 already used; 90 matches 80 (60 missed).
  CHECK(rec.false_alarms == 2);
  CHECK(rec.detection_delays == std::vector<Step>{5, 10});
  CHECK(rec.trajectory.size() == 10);
  CHECK(rec.trajectory.back().t == 100);
  CHECK(rec.trajectory.back().detections == 4);
}

TEST_CASE("trajectories are monotone and sum to the total") {
  json cfg = config("prudent", {{"generate",
                                 {{"case", "a"},
                                  {"K", 2},
                                  {"T", 3000},
                                  {"M", 2},
                                  {"gaps", {{0.0, 0.5}, {0.9, 0.0}}},
                                  {"top_mean", 0.95},
                                  {"noise", {{"kind", "bernoulli"}}}}}});
  cfg["params"]["M"] = 2;
  cfg["workers"] = 3;
  const auto report = run_experiment(parse_run_config(cfg));
  REQUIRE(report.seeds.size() == 3);
  CHECK(report.seeds[0].seed < report.seeds[1].seed);
  for (const auto& s : report.seeds) {
    CHECK(s.trajectory.size() == 1000);
    CHECK(std::abs(s.increment_sum - s.final_regret) <= 1e-9);
    for (std::size_t i = 1; i < s.trajectory.size(); ++i) {
      CHECK(s.trajectory[i].cum_regret >= s.trajectory[i - 1].cum_regret);
      CHECK(s.trajectory[i].t > s.trajectory[i - 1].t);
    }
  }
  CHECK(report.true_change_points.size() == 1);
}

TEST_CASE("outputs are byte-identical across executions") {
  const auto dir = scratch("determinism");
  json cfg = config("prudent");
  cfg["environment"] = {{"generate",
                         {{"case", "a"}, {"K", 3}, {"T", 600}, {"M", 2}, {"gaps", {{0.0, 0.3, 0.6}, {0.6, 0.3, 0.0}}},
                          {"noise", {{"kind", "bernoulli"}}}}}};
  cfg["seeds"] = {5, 1, 9, 4};
  cfg["params"]["M"] = 2;
  std::string csv[2], js[2];
  for (int i = 0; i < 2; ++i) {
    cfg["workers"] = 1 + 3 * i;
    cfg["outputs"] = {{"csv", "run.csv"}, {"json", "run.json"}, {"plot", "run.svg"}, {"trace_dir", "traces"}};
    run_experiment(parse_run_config(cfg, dir));
    csv[i] = slurp(dir / "run.csv");
    js[i] = slurp(dir / "run.json");
  }
  CHECK(csv[0] == csv[1]);
  CHECK(js[0] == js[1]);
  CHECK(csv[0].rfind("seed,t,cum_regret,episode,detections\n", 0) == 0);
  CHECK(fs::exists(dir / "traces" / "seed_9.jsonl"));
  CHECK(slurp(dir / "run.svg").find("<svg") != std::string::npos);
  const auto doc = json::parse(js[0]);
  CHECK(doc["seeds"][0]["seed"] == 1);
  fs::remove_all(dir);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_run_config(config("prudent")));
  auto bad = [](auto edit) {
    json c = config("prudent");
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["schema_version"] = 2; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c.erase("seeds"); })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["seeds"] = json::array(); })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["seeds"] = {1, 1}; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["policy"] = "ucb"; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["params"]["M"] = 0; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["params"]["scan_mode"] = "dense"; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["params"]["M"] = "two"; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["workers"] = 0; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) { c["environment"]["path"] = "x.json"; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(bad([](json& c) {
                    c["policy"] = "selective";
                    c["bound_constant"] = 4.0;
                  })),
                  ConfigError);
  // Policy and observation mode must agree.
  CHECK_THROWS_AS(resolve_environment(parse_run_config(config("selective"))), ConfigError);
  json gap_env = stationary_spec();
  gap_env["mode"] = "gap";
  CHECK_THROWS_AS(resolve_environment(parse_run_config(config("prudent", {{"spec", gap_env}}))), ConfigError);
  CHECK(run_experiment(parse_run_config(config("selective", {{"spec", gap_env}}))).summary.mean > 0.0);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}
