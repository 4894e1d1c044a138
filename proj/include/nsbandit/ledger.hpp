#pragma once

// Round/episode bookkeeping and the estimators built on it.
//
// Rounds are numbered from 1. A round r covers the consecutive time steps
// [t_r, t_{r+1}) and pulls each arm of its active set once, in increasing arm
// order. Estimators over rounds [r1, r2) only see rounds that have been
// closed and never reach before the start of the current episode.

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "nsbandit/environment.hpp"

namespace nsbandit {

struct Observation {
  int arm = 0;
  Step time = 0;
  double value = 0.0;
};

struct RoundRecord {
  int round = 0;
  std::vector<int> active_set;
  Step start_time = 0;
  std::vector<Observation> observations;
  // Optional snapshots taken by the policy when the round was opened.
  std::vector<double> quotas;
  std::vector<Step> recencies;
};

struct GapEstimate {
  double value = 0.0;
  int witness = 0;  // comparison arm attaining the max; lowest index on ties
};

/// How the exploration quota is valued once the gap lower bound first turns
/// positive. as_printed: the raw estimate at that round; lower_bound: the
/// lower bound itself (the reading where both cases use the same quantity).
enum class QuotaRule { as_printed, lower_bound };

class EpisodeLedger {
 public:
  EpisodeLedger(int num_arms, Step horizon);

  int num_arms() const noexcept { return num_arms_; }
  Step horizon() const noexcept { return horizon_; }
  /// log(2 K T^3), natural log, computed once.
  double log_term() const noexcept { return log_term_; }

  /// Opens round closed_rounds()+1. Closes the previous round if still open.
  /// The active set must be strictly increasing arm indices in [1,K].
  void open_round(std::vector<int> active_set, std::vector<double> quotas = {},
                  std::vector<Step> recencies = {});
  /// Records the next pull of the open round; arms must follow the active
  /// set order. Returns the time step of the pull.
  Step record(int arm, double value);
  void close_round();

  /// Starts a new episode at round rho (must be the next round to open).
  /// Frozen quotas are cleared; earlier rounds become invisible to queries.
  void start_episode(int rho);

  int closed_rounds() const noexcept { return closed_; }
  int episode_start() const noexcept { return rho_; }
  int episode_index() const noexcept { return episode_; }
  Step pulls() const noexcept { return pulls_; }
  const std::vector<RoundRecord>& rounds() const noexcept { return rounds_; }

  /// t_r; valid for recorded rounds and for the next round.
  Step round_start_time(int r) const;

  /// S(r1, r2): arms pulled in every round of [r1, r2).
  std::vector<int> persistent_set(int r1, int r2) const;
  bool is_persistent(int k, int r1, int r2) const;
  /// T_k(r1, r2): pulls of arm k in rounds [r1, r2).
  int pull_count(int k, int r1, int r2) const;

  /// Average of X(k') - X(k) over the rounds of [r1,r2) that pulled k; 0 when
  /// k was never pulled. Throws ContractError if k' is not persistent.
  double gap_rel_estimate(int k, int k_ref, int r1, int r2) const;
  /// Max of gap_rel_estimate over S(r1, r2). Throws ContractError if S is empty.
  GapEstimate gap_estimate(int k, int r1, int r2) const;
  /// Gap-observation estimate: -(1/T_k) sum X(k); 0 when T_k = 0.
  double observed_gap_estimate(int k, int r1, int r2) const;

  /// Lower confidence bound on the gap, clipped at 0.
  ///   mean: est - sqrt(2 log(2KT^3) / T_k) - 2 B*
  ///   gap:  est - sqrt(log(2KT^3) / (2 T_k)) - 2 (T^{-1/2} v B*)
  double gap_lower_bound(int k, int r1, int r2, double B_star, ObservationMode mode) const;

  /// N_k(r) = t_r - (last pull time of k before t_r), or t_r if never pulled.
  Step recency(int k, int r) const;

  /// Exploration quota of arm k at round r (mean observations). Zero until
  /// the lower bound on [rho, r'') first turns positive for some r'' in
  /// (rho, r]; from then on frozen at estimate * sqrt(TK/M) until the episode
  /// ends.
  double exploration_quota(int k, int r, double B_star, int M, QuotaRule rule = QuotaRule::as_printed);
  std::optional<double> frozen_quota(int k) const;

  /// One JSON object per round: r, t_r, active set, pulls, quota snapshots.
  void dump_jsonl(std::ostream& out) const;

 private:
  void check_arm(int k) const;
  void check_range(int r1, int r2) const;
  std::size_t pair_index(int k, int k_ref) const {
    return static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(num_arms_) + static_cast<std::size_t>(k_ref - 1);
  }

  int num_arms_;
  Step horizon_;
  double log_term_;

  std::vector<RoundRecord> rounds_;
  int closed_ = 0;
  bool open_ = false;
  std::size_t next_slot_ = 0;
  Step pulls_ = 0;
  int rho_ = 1;
  int episode_ = 1;

  // Prefix tables indexed by round boundary j (0..closed): totals over rounds < j+1.
  std::vector<std::vector<int>> present_;     // [k] -> count of rounds pulling k
  std::vector<std::vector<double>> joint_;    // [(k,k')] -> sum of X(k') over rounds pulling both
  std::vector<std::vector<Step>> pull_times_;  // [k] -> increasing pull times

  std::vector<std::optional<double>> frozen_;
  std::vector<int> checked_through_;
};

}  // namespace nsbandit
