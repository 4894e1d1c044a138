#include "nsbandit/trace.hpp"

#include <algorithm>
#include <sstream>

#include "nsbandit/errors.hpp"

namespace nsbandit {

using nlohmann::json;

namespace {

json detection_json(const DetectionEvent& e) {
  return {{"type", "detection"}, {"round", e.round}, {"t", e.time}, {"k", e.arm},
          {"u", e.u},           {"v", e.v},         {"u2", e.u2},  {"v2", e.v2},
          {"left", e.left},     {"right", e.right}, {"threshold", e.threshold}};
}

}  // namespace

Step resolve_budget(const EnvironmentSpec& env, const RunOptions& options) {
  if (options.first_time < 1 || options.first_time > env.horizon())
    throw InputError("run must start inside [1, T]");
  const Step room = env.horizon() - options.first_time + 1;
  if (options.budget < 0 || options.budget > room) throw InputError("run budget exceeds the horizon");
  return options.budget == 0 ? room : options.budget;
}

int RunTrace::pull_count(int k) const {
  return static_cast<int>(std::count_if(pulls.begin(), pulls.end(), [k](const PullRecord& p) { return p.arm == k; }));
}

void write_trace_jsonl(const RunTrace& trace, std::ostream& out) {
  out << json{{"type", "header"},
              {"policy", trace.policy},
              {"mode", to_string(trace.mode)},
              {"seed", trace.seed},
              {"env_hash", trace.env_hash},
              {"params", trace.params}}
             .dump()
      << '\n';
  // Pulls and detections interleaved in time order.
  std::size_t d = 0;
  for (const auto& p : trace.pulls) {
    while (d < trace.detections.size() && trace.detections[d].time < p.t) {
      out << detection_json(trace.detections[d++]).dump() << '\n';
    }
    out << json{{"type", "pull"}, {"t", p.t}, {"k", p.arm}, {"x", p.reward}, {"regret", p.regret},
                {"round", p.round}, {"episode", p.episode}}
               .dump()
        << '\n';
  }
  for (; d < trace.detections.size(); ++d) {
    out << detection_json(trace.detections[d]).dump() << '\n';
  }
  json episodes = json::array();
  for (const auto& e : trace.episodes) episodes.push_back({{"episode", e.episode}, {"round", e.round}, {"t", e.time}});
  out << json{{"type", "footer"},
              {"total_regret", trace.total_regret},
              {"episodes", trace.num_episodes()},
              {"episode_starts", std::move(episodes)},
              {"forced_progress", trace.forced_progress}}
             .dump()
      << '\n';
}

std::string trace_to_jsonl(const RunTrace& trace) {
  std::ostringstream os;
  write_trace_jsonl(trace, os);
  return os.str();
}

}  // namespace nsbandit
