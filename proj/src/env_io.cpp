#include "nsbandit/env_io.hpp"

#include <fstream>
#include <sstream>

#include "nsbandit/errors.hpp"

namespace nsbandit {

using nlohmann::json;

ObservationMode parse_mode(const std::string& text) {
  if (text == "mean") return ObservationMode::mean;
  if (text == "gap") return ObservationMode::gap;
  throw ConfigError("unknown observation mode '" + text + "'");
}

NoiseKind parse_noise_kind(const std::string& text) {
  if (text == "none") return NoiseKind::none;
  if (text == "bernoulli") return NoiseKind::bernoulli;
  if (text == "truncated_gaussian") return NoiseKind::truncated_gaussian;
  throw ConfigError("unknown noise model '" + text + "'");
}

json to_json(const EnvironmentSpec& env) {
  json arms = json::array();
  for (const auto& mf : env.means()) {
    json segs = json::array();
    for (const auto& s : mf.segments()) segs.push_back({{"start", s.start}, {"coefficients", s.coefficients}});
    arms.push_back({{"segments", std::move(segs)}});
  }
  json doc = {{"schema_version", kEnvSchemaVersion},
              {"K", env.num_arms()},
              {"T", env.horizon()},
              {"mode", to_string(env.mode())},
              {"noise", {{"kind", to_string(env.noise().kind)}, {"sigma", env.noise().sigma}}},
              {"arms", std::move(arms)}};
  if (const auto& info = env.info()) {
    doc["generator"] = {{"name", info->name},
                        {"change_points", info->change_points},
                        {"parameters", info->parameters},
                        {"coefficient_norms", info->coefficient_norms},
                        {"degrees", info->degrees}};
  }
  return doc;
}

EnvironmentSpec environment_from_json(const json& doc) {
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kEnvSchemaVersion)
      throw ConfigError("unsupported environment schema_version " + std::to_string(version));
    const int K = doc.at("K").get<int>();
    const Step T = doc.at("T").get<Step>();
    const auto& arms = doc.at("arms");
    if (!arms.is_array() || static_cast<int>(arms.size()) != K)
      throw ConfigError("'arms' must list exactly K mean functions");
    std::vector<MeanFunction> means;
    for (const auto& arm : arms) {
      std::vector<Segment> segs;
      for (const auto& s : arm.at("segments"))
        segs.push_back({s.at("start").get<Step>(), s.at("coefficients").get<std::vector<double>>()});
      means.emplace_back(std::move(segs));
    }
    NoiseModel noise;
    if (doc.contains("noise")) {
      noise.kind = parse_noise_kind(doc["noise"].at("kind").get<std::string>());
      noise.sigma = doc["noise"].value("sigma", 0.0);
    }
    const ObservationMode mode = parse_mode(doc.value("mode", std::string("mean")));
    std::optional<GeneratorInfo> info;
    if (doc.contains("generator")) {
      const auto& g = doc["generator"];
      GeneratorInfo gi;
      gi.name = g.at("name").get<std::string>();
      gi.change_points = g.value("change_points", std::vector<Step>{});
      gi.parameters = g.value("parameters", std::map<std::string, double>{});
      gi.coefficient_norms = g.value("coefficient_norms", std::vector<std::vector<double>>{});
      gi.degrees = g.value("degrees", std::vector<int>{});
      info = std::move(gi);
    }
    return EnvironmentSpec(T, std::move(means), noise, mode, std::move(info));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed environment document: ") + e.what());
  }
}

EnvironmentSpec load_environment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open environment file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return environment_from_json(doc);
}

void save_environment(const EnvironmentSpec& env, const std::filesystem::path& path) {
  write_file_atomically(path, to_json(env).dump(2) + "\n");
}

std::uint64_t environment_hash(const EnvironmentSpec& env) {
  const std::string text = to_json(env).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json to_json(const PartitionReport& report, bool full) {
  using nlohmann::json;
  json gaps = json::array(), drifts = json::array();
  for (const auto& g : report.gap_evidence) {
    if (g.ok && !full) continue;
    json e = {{"arm", g.arm},         {"interval", g.interval}, {"min_gap", g.min_gap},
              {"max_gap", g.max_gap}, {"small_gap", g.small_gap}, {"ok", g.ok}};
    e["level"] = g.level ? json(*g.level) : json(nullptr);
    if (!g.ok) {
      e["argmin_t"] = g.argmin_t;
      e["argmax_t"] = g.argmax_t;
    }
    gaps.push_back(std::move(e));
  }
  for (const auto& d : report.drift_evidence) {
    if (d.ok && !full) continue;
    drifts.push_back({{"interval", d.interval},
                      {"max_drift", d.max_drift},
                      {"ok", d.ok},
                      {"witness", {d.witness_t, d.witness_t2}}});
  }
  return {{"ok", report.ok},
          {"M", report.num_intervals()},
          {"B_star", report.B_star},
          {"change_points", report.change_points},
          {full ? "gap_evidence" : "gap_failures", std::move(gaps)},
          {full ? "drift_evidence" : "drift_failures", std::move(drifts)}};
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace nsbandit
