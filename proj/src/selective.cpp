#include "nsbandit/selective.hpp"

#include <algorithm>
#include <cmath>

#include "nsbandit/env_io.hpp"
#include "nsbandit/errors.hpp"

namespace nsbandit {

void SelectiveParams::validate() const {
  if (!(B_star >= 0.0) || !std::isfinite(B_star)) throw InputError("B* must be a finite non-negative number");
}

nlohmann::json SelectiveParams::to_json() const { return {{"B_star", B_star}}; }

std::vector<int> selective_active_set(const EpisodeLedger& ledger, const SelectiveParams& params, int r) {
  const int rho = ledger.episode_start();
  std::vector<int> out;
  for (int k = 1; k <= ledger.num_arms(); ++k) {
    bool alive = true;
    for (int rr = rho + 1; rr <= r && alive; ++rr)
      alive = ledger.gap_lower_bound(k, rho, rr, params.B_star, ObservationMode::gap) == 0.0;
    if (alive) out.push_back(k);
  }
  return out;
}

std::vector<int> SelectiveEliminator::update(const EpisodeLedger& ledger, const SelectiveParams& params, int r) {
  const int rho = ledger.episode_start();
  std::vector<int> out;
  for (int k = 1; k <= ledger.num_arms(); ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    if (!eliminated_[idx] && r > rho &&
        ledger.gap_lower_bound(k, rho, r, params.B_star, ObservationMode::gap) > 0.0)
      eliminated_[idx] = true;
    if (!eliminated_[idx]) out.push_back(k);
  }
  return out;
}

RunTrace run_selective(const EnvironmentSpec& env, const SelectiveParams& params, const NoiseStream& noise,
                       const RunOptions& options) {
  if (env.mode() != ObservationMode::gap) throw ModeError("SelectiveBandits needs a gap-observation environment");
  params.validate();
  const Step budget = resolve_budget(env, options);
  const Step offset = options.first_time - 1;
  EpisodeLedger ledger(env.num_arms(), env.horizon());
  SelectiveEliminator eliminator(env.num_arms());

  RunTrace trace;
  trace.policy = "selective";
  trace.mode = env.mode();
  trace.seed = noise.seed();
  trace.env_hash = environment_hash(env);
  trace.params = params.to_json();
  trace.episodes.push_back({1, 1, options.first_time});

  for (int r = 1; ledger.pulls() < budget; ++r) {
    auto active = eliminator.update(ledger, params, r);
    if (active.empty()) {
      // Every arm ruled out: the episode restarts at this round, which stays
      // empty so that the next one sees the full arm set.
      ledger.start_episode(r);
      eliminator.reset();
      trace.episodes.push_back({ledger.episode_index(), r, offset + ledger.pulls() + 1});
      ledger.open_round({});
      ledger.close_round();
      trace.active_set_sizes.push_back(0);
      continue;
    }
    ledger.open_round(active);
    for (int k : active) {
      if (ledger.pulls() >= budget) break;
      const Step t = offset + ledger.pulls() + 1;
      const double x = sample_reward(env, k, t, noise);
      ledger.record(k, x);
      const double regret = gap_at(env, k, t);
      trace.pulls.push_back({t, k, x, regret, r, ledger.episode_index()});
      trace.total_regret += regret;
    }
    ledger.close_round();
    trace.active_set_sizes.push_back(static_cast<int>(active.size()));
  }
  return trace;
}

}  // namespace nsbandit
