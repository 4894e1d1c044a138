#pragma once

// PrudentBandits: round-based sampling of an active set, forced exploration of
// ruled-out arms, and detection of significant changes in the gaps.

#include <optional>
#include <vector>

#include <json.hpp>

#include "nsbandit/counter_rng.hpp"
#include "nsbandit/environment.hpp"
#include "nsbandit/ledger.hpp"
#include "nsbandit/trace.hpp"

namespace nsbandit {

enum class ScanMode { exhaustive, geometric_grid };

/// Right-hand side of the change test. as_printed: 2 est(u,v) + radius + 2B*.
/// symmetric: 2 max(est(u,v), est(u',v')) + radius + 2B*.
enum class DetectionRule { as_printed, symmetric };

struct PrudentParams {
  int M = 1;
  double B_star = 0.0;
  ScanMode scan_mode = ScanMode::geometric_grid;
  double grid_base = 2.0;
  DetectionRule detection_rule = DetectionRule::as_printed;
  QuotaRule quota_rule = QuotaRule::as_printed;

  /// Throws InputError on M < 1, B* < 0 or grid_base <= 1.
  void validate() const;
  nlohmann::json to_json() const;
};

struct ActiveSetChoice {
  std::vector<int> arms;
  std::vector<double> quotas;   // per arm, index k-1
  std::vector<Step> recencies;  // per arm, index k-1
  bool forced = false;          // set was empty; closest arm pulled instead
};

/// K_r = {k : quota_k(r) <= N_k(r)} in increasing order. When empty, the
/// arm minimising quota - recency (lowest index on ties) is returned alone.
ActiveSetChoice select_active_set(EpisodeLedger& ledger, const PrudentParams& params, int r);

/// Round boundaries scanned by cp_detect on [rho, r]. Exhaustive: every
/// round. Geometric grid: rho, r-1, r, rho + ceil(b^i) and r - ceil(b^i).
std::vector<int> scan_endpoints(int rho, int r, const PrudentParams& params);

/// Looks for arm k and boundaries u<v, u'<v' in [rho, r] with
///   |est_k(u,v) - est_k(u',v')| >= 2 est_k(u,v) + 2 sqrt(2 log(2KT^3) / min(T_k(u,v), T_k(u',v'))) + 2B*,
/// using only the closed rounds [rho, r). Pairs with no pull of k or no
/// persistent comparison arm are skipped. Returns the first hit by arm, then
/// lexicographic (u, v, u', v').
std::optional<DetectionEvent> cp_detect(const EpisodeLedger& ledger, const PrudentParams& params, int r);

RunTrace run_prudent(const EnvironmentSpec& env, const PrudentParams& params, const NoiseStream& noise,
                     const RunOptions& options = {});

}  // namespace nsbandit
