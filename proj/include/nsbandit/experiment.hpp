#pragma once

// Seed-batch experiment runner and report emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nsbandit/environment.hpp"
#include "nsbandit/prudent.hpp"
#include "nsbandit/selective.hpp"
#include "nsbandit/trace.hpp"

namespace nsbandit {

inline constexpr int kConfigSchemaVersion = 1;

/// Builds an environment from a generator request:
///   {"case": "a"|"b"|"c"|"d", "K", "T", "seed", case arguments..., "noise", "mode"}
/// Case arguments: a: M, gaps (rows of K gaps), optional change_points and
/// top_mean; b: M_star, gamma_star, u_star; c: M_star, alpha; d:
/// upsilon_star, B_star.
EnvironmentSpec generate_environment(const nlohmann::json& request);

enum class PolicyKind { prudent, selective, oracle, uniform };
PolicyKind parse_policy(const std::string& text);
std::string to_string(PolicyKind policy);

struct OutputPaths {
  std::optional<std::filesystem::path> csv, json, plot, trace_dir;
};

struct RunConfig {
  /// Exactly one of {"spec": {...}}, {"path": "..."} or {"generate": {...}}.
  nlohmann::json environment;
  PolicyKind policy = PolicyKind::prudent;
  PrudentParams prudent;
  SelectiveParams selective;
  std::vector<std::uint64_t> seeds;
  OutputPaths outputs;
  int workers = 1;
  /// C in the prudent bound overlay; c (>= 16) for the selective one.
  double bound_constant = 1.0;
  /// Directory that relative paths are resolved against.
  std::filesystem::path base_dir = ".";
};

/// Throws ConfigError with the offending field on any problem.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

EnvironmentSpec resolve_environment(const RunConfig& config);

/// Runs one policy on env with the noise stream of `seed`.
RunTrace run_policy(const EnvironmentSpec& env, const RunConfig& config, std::uint64_t seed);

struct TrajectoryPoint {
  Step t = 0;
  double cum_regret = 0.0;
  int episode = 1;
  int detections = 0;  // detections at or before t
};

struct SeedRecord {
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  double increment_sum = 0.0;  // recomputed from per-pull regret increments
  std::vector<TrajectoryPoint> trajectory;
  std::vector<Step> detection_times;
  int episodes = 1;
  int forced_progress = 0;
  int false_alarms = 0;
  std::vector<Step> detection_delays;  // one per matched true change
};

struct Summary {
  std::size_t runs = 0;
  double mean = 0.0, median = 0.0, q1 = 0.0, q3 = 0.0, iqr = 0.0;
  int false_alarms = 0;
  int runs_with_detection = 0;
  std::optional<double> mean_detection_delay;
};

struct RunReport {
  std::string policy;
  nlohmann::json params;
  int K = 0;
  Step T = 0;
  std::uint64_t env_hash = 0;
  std::vector<Step> true_change_points;  // interior change points used for scoring
  std::vector<SeedRecord> seeds;         // sorted by seed
  Summary summary;
  std::vector<std::pair<Step, double>> bound_curve;
};

/// Interior change points of env: generator metadata when present, else the
/// union of segment starts.
std::vector<Step> true_change_points(const EnvironmentSpec& env);

/// Downsampled record of one run. Each detection is matched to the latest
/// not-yet-matched true change at or before it (changes it skips over are
/// missed); detections with nothing to match are false alarms.
SeedRecord summarize_trace(const RunTrace& trace, const std::vector<Step>& change_points,
                           std::size_t max_points = 1000);

/// Throws InputError on an empty input.
Summary aggregate(const std::vector<SeedRecord>& records);

RunReport run_experiment(const RunConfig& config);

std::string report_csv(const RunReport& report);
nlohmann::json report_json(const RunReport& report);
std::string report_svg(const RunReport& report);

void emit_csv(const RunReport& report, const std::filesystem::path& path);
void emit_json(const RunReport& report, const std::filesystem::path& path);
void emit_plot(const RunReport& report, const std::filesystem::path& path);

}  // namespace nsbandit
