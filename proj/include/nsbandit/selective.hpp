#pragma once

// SelectiveBandits for the gap-observation model: arms are eliminated once
// their gap lower bound turns positive, and an empty active set starts a new
// episode with every arm restored.

#include <algorithm>
#include <vector>

#include <json.hpp>

#include "nsbandit/counter_rng.hpp"
#include "nsbandit/environment.hpp"
#include "nsbandit/ledger.hpp"
#include "nsbandit/trace.hpp"

namespace nsbandit {

struct SelectiveParams {
  double B_star = 0.0;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Arms whose gap lower bound on [rho, r') was 0 for every r' in (rho, r].
/// Recomputed from the ledger; the run loop keeps an equivalent sticky flag.
std::vector<int> selective_active_set(const EpisodeLedger& ledger, const SelectiveParams& params, int r);

/// Incremental form of selective_active_set: each arm is checked once per
/// round and stays out once eliminated.
class SelectiveEliminator {
 public:
  explicit SelectiveEliminator(int num_arms) : eliminated_(static_cast<std::size_t>(num_arms), false) {}

  std::vector<int> update(const EpisodeLedger& ledger, const SelectiveParams& params, int r);
  void reset() { std::fill(eliminated_.begin(), eliminated_.end(), false); }

 private:
  std::vector<bool> eliminated_;
};

/// Throws ModeError on a mean-observation environment.
RunTrace run_selective(const EnvironmentSpec& env, const SelectiveParams& params, const NoiseStream& noise,
                       const RunOptions& options = {});

}  // namespace nsbandit
