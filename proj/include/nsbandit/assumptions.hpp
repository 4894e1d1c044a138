#pragma once

// Mechanical checks of the structural assumptions on a candidate partition
// 1 = c_1 < ... < c_M < c_{M+1} = T+1 of the horizon:
//
//   drift:  |mu*(t) - mu*(t')| <= B*            for t,t' in one interval, |t-t'| <= K
//   gaps:   every arm, every interval, either  max/min gap <= ratio_bound
//           or every gap <= 2 (T^{-1/2} v B*)   (the "small gap" band)
//
// The pairwise form of the gap condition (ratio within [1/c, c] or Delta(t) in
// the band, for all t,t') reduces to the per-interval form above: a pair
// violating the ratio needs both members in the band.

#include <cmath>
#include <optional>
#include <vector>

#include "nsbandit/environment.hpp"

namespace nsbandit {

struct AssumptionOptions {
  /// Allowed within-interval ratio of gaps. The stated assumption uses
  /// 2^{1/4}; the level-set construction used to count intervals for the
  /// corollaries works with factor-2 bands.
  double ratio_bound = std::pow(2.0, 0.25);
  /// Absolute slack on band and drift comparisons (floating evaluation).
  double tolerance = 1e-12;
};

struct GapEvidence {
  int arm = 0;       // 1-based
  int interval = 0;  // 1-based
  double min_gap = 0.0;
  double max_gap = 0.0;
  bool small_gap = false;
  /// Level index kappa with gaps in [2^{kappa/2} b, ...), b = T^{-1/2} v B*;
  /// set only when the ratio branch holds.
  std::optional<int> level;
  bool ok = false;
  /// On failure: the time steps holding the min and max gap.
  Step argmin_t = 0;
  Step argmax_t = 0;
};

struct DriftEvidence {
  int interval = 0;
  double max_drift = 0.0;  // over pairs at distance <= K inside the interval
  bool ok = false;
  Step witness_t = 0;
  Step witness_t2 = 0;
};

struct PartitionReport {
  std::vector<Step> change_points;
  double B_star = 0.0;
  std::vector<GapEvidence> gap_evidence;  // ordered by interval, then arm
  std::vector<DriftEvidence> drift_evidence;
  bool ok = false;

  /// M, the number of intervals.
  int num_intervals() const noexcept { return static_cast<int>(change_points.size()) - 1; }
};

/// Small-gap threshold 2 (T^{-1/2} v B*).
double small_gap_band(Step horizon, double B_star);

/// Checks every (arm, interval) and the drift of mu* on the candidate
/// partition. Throws InputError when the change points are not a valid
/// partition of [1, T] (first 1, last T+1, strictly increasing).
PartitionReport validate_assumptions(const EnvironmentSpec& env, std::vector<Step> change_points,
                                     double B_star, const AssumptionOptions& options = {});

/// Left-to-right greedy partition: each interval is extended while the
/// assumptions still hold on it, and a new one starts at the first violating
/// step. Both conditions are inherited by sub-intervals, so the maximal
/// greedy extension yields the fewest intervals for that predicate; the
/// result always validates.
PartitionReport minimal_significant_partition(const EnvironmentSpec& env, double B_star,
                                              const AssumptionOptions& options = {});

}  // namespace nsbandit
