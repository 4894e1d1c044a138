#include "nsbandit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "nsbandit/baselines.hpp"
#include "nsbandit/env_io.hpp"
#include "nsbandit/errors.hpp"
#include "nsbandit/generators.hpp"
#include "nsbandit/params.hpp"

namespace nsbandit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class T>
T field(const json& doc, const char* key, const char* where) {
  if (!doc.contains(key)) throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const json& doc, const char* key, T fallback, const char* where) {
  return doc.contains(key) ? field<T>(doc, key, where) : fallback;
}

NoiseModel noise_from(const json& request) {
  NoiseModel noise;
  if (!request.contains("noise")) return noise;
  const auto& n = request.at("noise");
  noise.kind = parse_noise_kind(field<std::string>(n, "kind", "noise"));
  noise.sigma = field_or<double>(n, "sigma", 0.0, "noise");
  return noise;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ScanMode parse_scan_mode(const std::string& s) {
  if (s == "exhaustive") return ScanMode::exhaustive;
  if (s == "geometric_grid" || s == "geometric-grid") return ScanMode::geometric_grid;
  throw ConfigError("params: unknown scan_mode '" + s + "'");
}

DetectionRule parse_detection_rule(const std::string& s) {
  if (s == "as_printed") return DetectionRule::as_printed;
  if (s == "symmetric") return DetectionRule::symmetric;
  throw ConfigError("params: unknown detection_rule '" + s + "'");
}

QuotaRule parse_quota_rule(const std::string& s) {
  if (s == "as_printed") return QuotaRule::as_printed;
  if (s == "lower_bound") return QuotaRule::lower_bound;
  throw ConfigError("params: unknown quota_rule '" + s + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

EnvironmentSpec generate_environment(const json& request) {
  const char* where = "generator";
  const auto tag = field<std::string>(request, "case", where);
  const int K = field<int>(request, "K", where);
  const Step T = field<Step>(request, "T", where);
  Rng rng(field_or<std::uint64_t>(request, "seed", 0, where));
  EnvironmentSpec env = [&] {
    if (tag == "a") {
      GapProfile profile{field<std::vector<std::vector<double>>>(request, "gaps", where)};
      SwitchingOptions opts;
      opts.top_mean = field_or<double>(request, "top_mean", opts.top_mean, where);
      opts.change_points = field_or<std::vector<Step>>(request, "change_points", {}, where);
      return gen_switching(K, T, field<int>(request, "M", where), profile, rng, opts);
    }
    if (tag == "b")
      return gen_local_poly(K, T, field<int>(request, "M_star", where), field<int>(request, "gamma_star", where),
                            field<double>(request, "u_star", where), rng);
    if (tag == "c")
      return gen_holder(K, T, field<int>(request, "M_star", where), field<double>(request, "alpha", where), rng);
    if (tag == "d")
      return gen_inflexion(K, T, field<int>(request, "upsilon_star", where), field<double>(request, "B_star", where),
                           rng);
    throw ConfigError("generator: unknown case '" + tag + "'");
  }();
  env = env.with_noise(noise_from(request));
  if (request.contains("mode")) env = env.with_mode(parse_mode(field<std::string>(request, "mode", where)));
  return env;
}

PolicyKind parse_policy(const std::string& text) {
  if (text == "prudent") return PolicyKind::prudent;
  if (text == "selective") return PolicyKind::selective;
  if (text == "oracle") return PolicyKind::oracle;
  if (text == "uniform") return PolicyKind::uniform;
  throw ConfigError("unknown policy '" + text + "'");
}

std::string to_string(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::prudent: return "prudent";
    case PolicyKind::selective: return "selective";
    case PolicyKind::oracle: return "oracle";
    case PolicyKind::uniform: return "uniform";
  }
  return "?";
}

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  const char* where = "config";
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (field<int>(doc, "schema_version", where) != kConfigSchemaVersion)
    throw ConfigError("config: unsupported schema_version");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.environment = field<json>(doc, "environment", where);
  const int sources = static_cast<int>(cfg.environment.contains("spec")) +
                      static_cast<int>(cfg.environment.contains("path")) +
                      static_cast<int>(cfg.environment.contains("generate"));
  if (sources != 1) throw ConfigError("environment: give exactly one of spec, path, generate");
  cfg.policy = parse_policy(field<std::string>(doc, "policy", where));

  const json params = field_or<json>(doc, "params", json::object(), where);
  const char* pw = "params";
  cfg.prudent.M = field_or<int>(params, "M", 1, pw);
  cfg.prudent.B_star = field_or<double>(params, "B_star", 0.0, pw);
  cfg.prudent.scan_mode = parse_scan_mode(field_or<std::string>(params, "scan_mode", "geometric_grid", pw));
  cfg.prudent.grid_base = field_or<double>(params, "grid_base", 2.0, pw);
  cfg.prudent.detection_rule = parse_detection_rule(field_or<std::string>(params, "detection_rule", "as_printed", pw));
  cfg.prudent.quota_rule = parse_quota_rule(field_or<std::string>(params, "quota_rule", "as_printed", pw));
  cfg.selective.B_star = cfg.prudent.B_star;
  try {
    cfg.prudent.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }

  cfg.seeds = field<std::vector<std::uint64_t>>(doc, "seeds", where);
  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    throw ConfigError("config: seeds must be distinct");

  const json outputs = field_or<json>(doc, "outputs", json::object(), where);
  auto out_path = [&](const char* key) -> std::optional<fs::path> {
    if (!outputs.contains(key)) return std::nullopt;
    return resolve(base_dir, field<std::string>(outputs, key, "outputs"));
  };
  cfg.outputs = {out_path("csv"), out_path("json"), out_path("plot"), out_path("trace_dir")};
  cfg.workers = field_or<int>(doc, "workers", 1, where);
  if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
  cfg.bound_constant =
      field_or<double>(doc, "bound_constant", cfg.policy == PolicyKind::selective ? 16.0 : 1.0, where);
  if (cfg.policy == PolicyKind::selective && cfg.bound_constant < 16.0)
    throw ConfigError("config: bound_constant must be >= 16 for the selective policy");
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

EnvironmentSpec resolve_environment(const RunConfig& config) {
  const auto& e = config.environment;
  EnvironmentSpec env = e.contains("spec")   ? environment_from_json(e.at("spec"))
                        : e.contains("path") ? load_environment(resolve(config.base_dir, e.at("path").get<std::string>()))
                                             : generate_environment(e.at("generate"));
  const bool gap = env.mode() == ObservationMode::gap;
  if (config.policy == PolicyKind::selective && !gap)
    throw ConfigError("policy selective needs a gap-observation environment");
  if (config.policy == PolicyKind::prudent && gap)
    throw ConfigError("policy prudent needs a mean-observation environment");
  return env;
}

RunTrace run_policy(const EnvironmentSpec& env, const RunConfig& config, std::uint64_t seed) {
  const NoiseStream noise(seed);
  switch (config.policy) {
    case PolicyKind::prudent: return run_prudent(env, config.prudent, noise);
    case PolicyKind::selective: return run_selective(env, config.selective, noise);
    case PolicyKind::oracle: return run_oracle(env, noise);
    case PolicyKind::uniform: return run_uniform(env, noise);
  }
  throw ConfigError("unknown policy");
}

std::vector<Step> true_change_points(const EnvironmentSpec& env) {
  std::set<Step> cps;
  if (env.info()) {
    for (Step c : env.info()->change_points)
      if (c > 1 && c <= env.horizon()) cps.insert(c);
  } else {
    for (const auto& mean : env.means())
      for (const auto& seg : mean.segments())
        if (seg.start > 1) cps.insert(seg.start);
  }
  return {cps.begin(), cps.end()};
}

SeedRecord summarize_trace(const RunTrace& trace, const std::vector<Step>& change_points,
                           std::size_t max_points) {
  SeedRecord rec;
  rec.seed = trace.seed;
  rec.final_regret = trace.total_regret;
  rec.episodes = trace.num_episodes();
  rec.forced_progress = trace.forced_progress;
  for (const auto& d : trace.detections) rec.detection_times.push_back(d.time);

  // Detection scoring against the true changes.
  std::size_t next_change = 0;
  for (Step d : rec.detection_times) {
    Step matched = 0;
    while (next_change < change_points.size() && change_points[next_change] <= d) matched = change_points[next_change++];
    if (matched > 0)
      rec.detection_delays.push_back(d - matched);
    else
      ++rec.false_alarms;
  }

  const Step n = static_cast<Step>(trace.pulls.size());
  if (n == 0) return rec;
  const Step points = std::min<Step>(n, static_cast<Step>(std::max<std::size_t>(max_points, 1)));
  std::size_t pull = 0, det = 0, ep = 0;
  double cum = 0.0;
  for (Step i = 1; i <= points; ++i) {
    const Step idx = (i * n + points - 1) / points;  // ceil(i n / points), last one = n
    while (static_cast<Step>(pull) < idx) {
      cum += trace.pulls[pull].regret;
      ++pull;
    }
    const Step t = trace.pulls[pull - 1].t;
    while (det < trace.detections.size() && trace.detections[det].time <= t) ++det;
    while (ep + 1 < trace.episodes.size() && trace.episodes[ep + 1].time <= t) ++ep;
    rec.trajectory.push_back({t, cum, trace.episodes.empty() ? 1 : trace.episodes[ep].episode, static_cast<int>(det)});
  }
  rec.increment_sum = cum;
  return rec;
}

Summary aggregate(const std::vector<SeedRecord>& records) {
  if (records.empty()) throw InputError("cannot aggregate an empty set of runs");
  Summary s;
  s.runs = records.size();
  std::vector<double> finals;
  double delay_sum = 0.0;
  std::size_t delay_count = 0;
  for (const auto& r : records) {
    finals.push_back(r.final_regret);
    s.false_alarms += r.false_alarms;
    if (!r.detection_times.empty()) ++s.runs_with_detection;
    for (Step d : r.detection_delays) {
      delay_sum += static_cast<double>(d);
      ++delay_count;
    }
  }
  double total = 0.0;
  for (double f : finals) total += f;
  s.mean = total / static_cast<double>(finals.size());
  std::sort(finals.begin(), finals.end());
  s.median = quantile(finals, 0.5);
  s.q1 = quantile(finals, 0.25);
  s.q3 = quantile(finals, 0.75);
  s.iqr = s.q3 - s.q1;
  if (delay_count > 0) s.mean_detection_delay = delay_sum / static_cast<double>(delay_count);
  return s;
}

RunReport run_experiment(const RunConfig& config) {
  const EnvironmentSpec env = resolve_environment(config);
  const auto cps = true_change_points(env);

  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<SeedRecord> records(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  std::optional<json> params_json;
  std::mutex params_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        const RunTrace trace = run_policy(env, config, seeds[i]);
        records[i] = summarize_trace(trace, cps);
        if (config.outputs.trace_dir) {
          fs::create_directories(*config.outputs.trace_dir);
          write_file_atomically(*config.outputs.trace_dir / ("seed_" + std::to_string(seeds[i]) + ".jsonl"),
                                trace_to_jsonl(trace));
        }
        std::lock_guard lock(params_mutex);
        if (!params_json) params_json = trace.params;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(config.workers), seeds.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("seed " + std::to_string(seeds[i]) + " failed: " + e.what());
    }
  }

  RunReport report;
  report.policy = to_string(config.policy);
  report.params = params_json.value_or(json::object());
  report.K = env.num_arms();
  report.T = env.horizon();
  report.env_hash = environment_hash(env);
  report.true_change_points = cps;
  report.seeds = std::move(records);
  report.summary = aggregate(report.seeds);

  if (config.policy == PolicyKind::prudent || config.policy == PolicyKind::selective) {
    for (const auto& p : report.seeds.front().trajectory) {
      const double M = config.prudent.M;
      const double v = config.policy == PolicyKind::prudent
                           ? regret_bound_prudent(M, config.prudent.B_star, report.K, p.t, config.bound_constant)
                           : regret_bound_selective(M, config.selective.B_star, report.K, p.t, config.bound_constant);
      report.bound_curve.emplace_back(p.t, v);
    }
  }

  if (config.outputs.csv) emit_csv(report, *config.outputs.csv);
  if (config.outputs.json) emit_json(report, *config.outputs.json);
  if (config.outputs.plot) emit_plot(report, *config.outputs.plot);
  return report;
}

std::string report_csv(const RunReport& report) {
  std::ostringstream os;
  os << "seed,t,cum_regret,episode,detections\n";
  for (const auto& r : report.seeds)
    for (const auto& p : r.trajectory)
      os << r.seed << ',' << p.t << ',' << fmt(p.cum_regret) << ',' << p.episode << ',' << p.detections << '\n';
  return os.str();
}

json report_json(const RunReport& report) {
  json seeds = json::array();
  for (const auto& r : report.seeds) {
    seeds.push_back({{"seed", r.seed},
                     {"final_regret", r.final_regret},
                     {"episodes", r.episodes},
                     {"forced_progress", r.forced_progress},
                     {"detection_times", r.detection_times},
                     {"detection_delays", r.detection_delays},
                     {"false_alarms", r.false_alarms}});
  }
  const auto& s = report.summary;
  json summary = {{"runs", s.runs},
                  {"mean_regret", s.mean},
                  {"median_regret", s.median},
                  {"q1_regret", s.q1},
                  {"q3_regret", s.q3},
                  {"iqr_regret", s.iqr},
                  {"false_alarms", s.false_alarms},
                  {"runs_with_detection", s.runs_with_detection},
                  {"mean_detection_delay", s.mean_detection_delay ? json(*s.mean_detection_delay) : json(nullptr)}};
  json bound = json::array();
  for (const auto& [t, v] : report.bound_curve) bound.push_back({t, v});
  return {{"schema_version", kConfigSchemaVersion},
          {"policy", report.policy},
          {"params", report.params},
          {"K", report.K},
          {"T", report.T},
          {"env_hash", report.env_hash},
          {"true_change_points", report.true_change_points},
          {"summary", std::move(summary)},
          {"seeds", std::move(seeds)},
          {"bound_curve", std::move(bound)}};
}

std::string report_svg(const RunReport& report) {
  constexpr double W = 800, H = 500, left = 70, right = 20, top = 30, bottom = 50;
  const double T = static_cast<double>(std::max<Step>(report.T, 1));
  double ymax = 0.0;
  for (const auto& r : report.seeds)
    for (const auto& p : r.trajectory) ymax = std::max(ymax, p.cum_regret);
  // The bound is usually far above the runs; keep it visible but capped.
  double bmax = 0.0;
  for (const auto& [t, v] : report.bound_curve) bmax = std::max(bmax, v);
  ymax = std::max({ymax, std::min(bmax, 4.0 * std::max(ymax, 1.0)), 1.0});
  auto X = [&](double t) { return left + (W - left - right) * t / T; };
  auto Y = [&](double v) { return H - bottom - (H - top - bottom) * std::min(v, ymax) / ymax; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << report.policy << ": cumulative regret, K=" << report.K << ", T=" << report.T << ", " << report.seeds.size()
     << " seeds</text>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">";
  os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
     << "\"/>";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\"/></g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = T * i / 5.0, v = ymax * i / 5.0;
    os << "<text x=\"" << X(t) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << fmt(std::round(t))
       << "</text>";
    os << "<text x=\"" << left - 6 << "\" y=\"" << Y(v) + 4 << "\" text-anchor=\"end\">" << fmt(std::round(v * 10) / 10)
       << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">t</text></g>\n";
  for (const auto& r : report.seeds) {
    os << "<polyline fill=\"none\" stroke=\"#4a7ab5\" stroke-opacity=\"0.35\" stroke-width=\"1\" points=\"";
    for (const auto& p : r.trajectory) os << fmt(X(static_cast<double>(p.t))) << ',' << fmt(Y(p.cum_regret)) << ' ';
    os << "\"/>\n";
  }
  if (!report.bound_curve.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-dasharray=\"6,4\" stroke-width=\"1.5\" points=\"";
    for (const auto& [t, v] : report.bound_curve) os << fmt(X(static_cast<double>(t))) << ',' << fmt(Y(v)) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - right - 4 << "\" y=\"" << top + 14
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#c0392b\">bound</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_csv(const RunReport& report, const fs::path& path) { write_file_atomically(path, report_csv(report)); }

void emit_json(const RunReport& report, const fs::path& path) {
  write_file_atomically(path, report_json(report).dump(2) + "\n");
}

void emit_plot(const RunReport& report, const fs::path& path) { write_file_atomically(path, report_svg(report)); }

}  // namespace nsbandit
