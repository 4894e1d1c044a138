#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsbandit/environment.hpp"

namespace nsbandit {

struct PullRecord {
  Step t = 0;
  int arm = 0;
  double reward = 0.0;
  double regret = 0.0;  // Delta_{k_t}(t)
  int round = 0;
  int episode = 0;
};

/// A change-point alarm: at the end of `round`, the estimates of `arm` on
/// rounds [u, v) and [u2, v2) differed by at least `threshold`.
struct DetectionEvent {
  int round = 0;
  Step time = 0;  // last time step of the detecting round
  int arm = 0;
  int u = 0, v = 0, u2 = 0, v2 = 0;
  double left = 0.0;   // estimate on [u, v)
  double right = 0.0;  // estimate on [u2, v2)
  double threshold = 0.0;

  bool operator==(const DetectionEvent&) const = default;
};

struct EpisodeStart {
  int episode = 1;
  int round = 1;
  Step time = 1;  // first time step of the episode

  bool operator==(const EpisodeStart&) const = default;
};

struct RunTrace {
  std::string policy;
  ObservationMode mode = ObservationMode::mean;
  std::uint64_t seed = 0;
  std::uint64_t env_hash = 0;
  nlohmann::json params;

  std::vector<PullRecord> pulls;
  std::vector<DetectionEvent> detections;
  std::vector<EpisodeStart> episodes;
  std::vector<int> active_set_sizes;  // per round
  int forced_progress = 0;
  double total_regret = 0.0;

  int num_episodes() const noexcept { return static_cast<int>(episodes.size()); }
  /// Pulls of arm k (1-based).
  int pull_count(int k) const;
};

/// Where a run starts inside the environment. Replays of an episode suffix
/// start at a later absolute time but keep the environment's horizon T in
/// every confidence radius.
struct RunOptions {
  Step first_time = 1;
  /// Number of pulls; 0 means "until T".
  Step budget = 0;
};

/// Resolved pull budget for env and options; throws InputError when the
/// window does not fit inside [1, T].
Step resolve_budget(const EnvironmentSpec& env, const RunOptions& options);

/// JSON-lines: header, one line per pull and per detection, footer.
void write_trace_jsonl(const RunTrace& trace, std::ostream& out);
std::string trace_to_jsonl(const RunTrace& trace);

}  // namespace nsbandit
