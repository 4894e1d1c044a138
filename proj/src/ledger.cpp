#include "nsbandit/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "nsbandit/errors.hpp"

namespace nsbandit {

EpisodeLedger::EpisodeLedger(int num_arms, Step horizon)
    : num_arms_(num_arms),
      horizon_(horizon),
      log_term_(std::log(2.0 * num_arms * std::pow(static_cast<double>(horizon), 3))),
      present_(static_cast<std::size_t>(num_arms), std::vector<int>{0}),
      joint_(static_cast<std::size_t>(num_arms) * static_cast<std::size_t>(num_arms), std::vector<double>{0.0}),
      pull_times_(static_cast<std::size_t>(num_arms)),
      frozen_(static_cast<std::size_t>(num_arms)),
      checked_through_(static_cast<std::size_t>(num_arms), 1) {
  if (num_arms < 1) throw InputError("ledger needs at least one arm");
  if (horizon < 1) throw InputError("ledger horizon must be >= 1");
}

void EpisodeLedger::check_arm(int k) const {
  if (k < 1 || k > num_arms_) {
    std::ostringstream os;
    os << "arm index " << k << " outside [1," << num_arms_ << "]";
    throw InputError(os.str());
  }
}

void EpisodeLedger::check_range(int r1, int r2) const {
  if (r1 >= r2) {
    std::ostringstream os;
    os << "round range [" << r1 << "," << r2 << ") is empty";
    throw InputError(os.str());
  }
  if (r1 < rho_) {
    std::ostringstream os;
    os << "round " << r1 << " precedes the current episode start " << rho_;
    throw InputError(os.str());
  }
  if (r2 > closed_ + 1) {
    std::ostringstream os;
    os << "round range [" << r1 << "," << r2 << ") reaches past the last closed round " << closed_;
    throw InputError(os.str());
  }
}

void EpisodeLedger::open_round(std::vector<int> active_set, std::vector<double> quotas, std::vector<Step> recencies) {
  if (open_) close_round();
  for (std::size_t i = 0; i < active_set.size(); ++i) {
    check_arm(active_set[i]);
    if (i > 0 && active_set[i] <= active_set[i - 1])
      throw InputError("active set must list arms in strictly increasing order");
  }
  RoundRecord rec;
  rec.round = closed_ + 1;
  rec.start_time = pulls_ + 1;
  rec.active_set = std::move(active_set);
  rec.quotas = std::move(quotas);
  rec.recencies = std::move(recencies);
  rounds_.push_back(std::move(rec));
  open_ = true;
  next_slot_ = 0;
}

Step EpisodeLedger::record(int arm, double value) {
  if (!open_) throw ContractError("record() without an open round");
  auto& rec = rounds_.back();
  if (next_slot_ >= rec.active_set.size() || rec.active_set[next_slot_] != arm)
    throw ContractError("pulls must follow the active set order");
  const Step t = ++pulls_;
  rec.observations.push_back({arm, t, value});
  pull_times_[static_cast<std::size_t>(arm - 1)].push_back(t);
  ++next_slot_;
  return t;
}

void EpisodeLedger::close_round() {
  if (!open_) return;
  const auto& rec = rounds_.back();
  std::vector<double> value(static_cast<std::size_t>(num_arms_), 0.0);
  std::vector<bool> pulled(static_cast<std::size_t>(num_arms_), false);
  for (const auto& obs : rec.observations) {
    value[static_cast<std::size_t>(obs.arm - 1)] = obs.value;
    pulled[static_cast<std::size_t>(obs.arm - 1)] = true;
  }
  for (int k = 1; k <= num_arms_; ++k) {
    auto& cnt = present_[static_cast<std::size_t>(k - 1)];
    cnt.push_back(cnt.back() + (pulled[static_cast<std::size_t>(k - 1)] ? 1 : 0));
    for (int kr = 1; kr <= num_arms_; ++kr) {
      auto& js = joint_[pair_index(k, kr)];
      const bool both = pulled[static_cast<std::size_t>(k - 1)] && pulled[static_cast<std::size_t>(kr - 1)];
      js.push_back(js.back() + (both ? value[static_cast<std::size_t>(kr - 1)] : 0.0));
    }
  }
  ++closed_;
  open_ = false;
}

void EpisodeLedger::start_episode(int rho) {
  if (open_) close_round();
  if (rho != closed_ + 1) throw InputError("a new episode must start at the next round");
  rho_ = rho;
  ++episode_;
  std::fill(frozen_.begin(), frozen_.end(), std::nullopt);
  std::fill(checked_through_.begin(), checked_through_.end(), rho);
}

Step EpisodeLedger::round_start_time(int r) const {
  if (r >= 1 && r <= static_cast<int>(rounds_.size())) return rounds_[static_cast<std::size_t>(r - 1)].start_time;
  if (r == static_cast<int>(rounds_.size()) + 1) return pulls_ + 1;
  std::ostringstream os;
  os << "unknown round " << r;
  throw InputError(os.str());
}

int EpisodeLedger::pull_count(int k, int r1, int r2) const {
  check_arm(k);
  check_range(r1, r2);
  const auto& cnt = present_[static_cast<std::size_t>(k - 1)];
  return cnt[static_cast<std::size_t>(r2 - 1)] - cnt[static_cast<std::size_t>(r1 - 1)];
}

bool EpisodeLedger::is_persistent(int k, int r1, int r2) const { return pull_count(k, r1, r2) == r2 - r1; }

std::vector<int> EpisodeLedger::persistent_set(int r1, int r2) const {
  check_range(r1, r2);
  std::vector<int> out;
  for (int k = 1; k <= num_arms_; ++k)
    if (is_persistent(k, r1, r2)) out.push_back(k);
  return out;
}

double EpisodeLedger::gap_rel_estimate(int k, int k_ref, int r1, int r2) const {
  check_arm(k_ref);
  if (!is_persistent(k_ref, r1, r2)) {
    std::ostringstream os;
    os << "comparison arm " << k_ref << " is not persistent on rounds [" << r1 << "," << r2 << ")";
    throw ContractError(os.str());
  }
  const int n = pull_count(k, r1, r2);
  if (n == 0) return 0.0;
  const auto& ref = joint_[pair_index(k, k_ref)];
  const auto& own = joint_[pair_index(k, k)];
  const auto a = static_cast<std::size_t>(r1 - 1), b = static_cast<std::size_t>(r2 - 1);
  return ((ref[b] - ref[a]) - (own[b] - own[a])) / n;
}

GapEstimate EpisodeLedger::gap_estimate(int k, int r1, int r2) const {
  check_arm(k);
  GapEstimate best;
  bool any = false;
  for (int kr = 1; kr <= num_arms_; ++kr) {
    if (!is_persistent(kr, r1, r2)) continue;
    const double v = gap_rel_estimate(k, kr, r1, r2);
    if (!any || v > best.value) best = {v, kr};
    any = true;
  }
  if (!any) {
    std::ostringstream os;
    os << "no persistent comparison arm on rounds [" << r1 << "," << r2 << ")";
    throw ContractError(os.str());
  }
  return best;
}

double EpisodeLedger::observed_gap_estimate(int k, int r1, int r2) const {
  const int n = pull_count(k, r1, r2);
  if (n == 0) return 0.0;
  const auto& own = joint_[pair_index(k, k)];
  return -(own[static_cast<std::size_t>(r2 - 1)] - own[static_cast<std::size_t>(r1 - 1)]) / n;
}

double EpisodeLedger::gap_lower_bound(int k, int r1, int r2, double B_star, ObservationMode mode) const {
  if (!(B_star >= 0.0)) throw InputError("B* must be non-negative");
  const int n = pull_count(k, r1, r2);
  if (n == 0) return 0.0;
  double bound = 0.0;
  if (mode == ObservationMode::mean) {
    bound = gap_estimate(k, r1, r2).value - std::sqrt(2.0 * log_term_ / n) - 2.0 * B_star;
  } else {
    const double tolerance = std::max(1.0 / std::sqrt(static_cast<double>(horizon_)), B_star);
    bound = observed_gap_estimate(k, r1, r2) - std::sqrt(log_term_ / (2.0 * n)) - 2.0 * tolerance;
  }
  return std::max(0.0, bound);
}

Step EpisodeLedger::recency(int k, int r) const {
  check_arm(k);
  const Step t_r = round_start_time(r);
  const auto& times = pull_times_[static_cast<std::size_t>(k - 1)];
  auto it = std::lower_bound(times.begin(), times.end(), t_r);
  if (it == times.begin()) return t_r;
  return t_r - *std::prev(it);
}

double EpisodeLedger::exploration_quota(int k, int r, double B_star, int M, QuotaRule rule) {
  check_arm(k);
  if (M < 1) throw InputError("M must be >= 1");
  if (r < rho_ || r > closed_ + 1) {
    std::ostringstream os;
    os << "quota requested for round " << r << " outside [" << rho_ << "," << closed_ + 1 << "]";
    throw InputError(os.str());
  }
  const auto idx = static_cast<std::size_t>(k - 1);
  if (frozen_[idx]) return r >= checked_through_[idx] ? *frozen_[idx] : 0.0;
  const double scale = std::sqrt(static_cast<double>(horizon_) * num_arms_ / M);
  for (int rr = std::max(checked_through_[idx] + 1, rho_ + 1); rr <= r; ++rr) {
    const double lb = gap_lower_bound(k, rho_, rr, B_star, ObservationMode::mean);
    checked_through_[idx] = rr;
    if (lb > 0.0) {
      const double est = rule == QuotaRule::as_printed ? gap_estimate(k, rho_, rr).value : lb;
      frozen_[idx] = est * scale;
      return *frozen_[idx];
    }
  }
  return 0.0;
}

std::optional<double> EpisodeLedger::frozen_quota(int k) const {
  check_arm(k);
  return frozen_[static_cast<std::size_t>(k - 1)];
}

void EpisodeLedger::dump_jsonl(std::ostream& out) const {
  for (const auto& rec : rounds_) {
    nlohmann::json pulls = nlohmann::json::array();
    for (const auto& o : rec.observations) pulls.push_back({{"k", o.arm}, {"t", o.time}, {"x", o.value}});
    nlohmann::json line = {{"r", rec.round},
                           {"t_r", rec.start_time},
                           {"active_set", rec.active_set},
                           {"pulls", std::move(pulls)},
                           {"quotas", rec.quotas},
                           {"recencies", rec.recencies}};
    out << line.dump() << '\n';
  }
}

}  // namespace nsbandit
