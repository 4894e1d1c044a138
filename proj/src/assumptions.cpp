#include "nsbandit/assumptions.hpp"

#include <algorithm>
#include <sstream>

#include "nsbandit/errors.hpp"

namespace nsbandit {

double small_gap_band(Step horizon, double B_star) {
  return 2.0 * std::max(1.0 / std::sqrt(static_cast<double>(horizon)), B_star);
}

namespace {

void check_partition(const std::vector<Step>& cps, Step horizon) {
  if (cps.size() < 2 || cps.front() != 1 || cps.back() != horizon + 1) {
    std::ostringstream os;
    os << "change points must start at 1 and end at T+1=" << horizon + 1;
    throw InputError(os.str());
  }
  for (std::size_t i = 1; i < cps.size(); ++i)
    if (cps[i] <= cps[i - 1]) throw InputError("change points must be strictly increasing");
}

// Running per-arm extremes of the gap over the current interval.
struct GapRange {
  double lo = 0.0;
  double hi = 0.0;
  Step lo_t = 0;
  Step hi_t = 0;

  void reset(double g, Step t) { lo = hi = g, lo_t = hi_t = t; }
  void add(double g, Step t) {
    if (g < lo) lo = g, lo_t = t;
    if (g > hi) hi = g, hi_t = t;
  }
};

bool range_ok(double lo, double hi, double band, const AssumptionOptions& opt) {
  if (hi <= band + opt.tolerance) return true;
  // A zero gap next to a gap above the band has an infinite ratio.
  return lo > 0.0 && hi <= opt.ratio_bound * lo * (1.0 + opt.tolerance);
}

}  // namespace

PartitionReport validate_assumptions(const EnvironmentSpec& env, std::vector<Step> change_points,
                                     double B_star, const AssumptionOptions& options) {
  if (!(B_star >= 0.0)) throw InputError("B* must be non-negative");
  const Step T = env.horizon();
  check_partition(change_points, T);
  const int K = env.num_arms();
  const double band = small_gap_band(T, B_star);
  const double base = band / 2.0;

  PartitionReport report;
  report.B_star = B_star;
  report.ok = true;
  const int M = static_cast<int>(change_points.size()) - 1;
  for (int m = 0; m < M; ++m) {
    const Step begin = change_points[static_cast<std::size_t>(m)];
    const Step end = change_points[static_cast<std::size_t>(m) + 1];

    for (int k = 0; k < K; ++k) {
      GapRange range;
      for (Step t = begin; t < end; ++t) {
        const double g = env.best_mean_unchecked(t) - env.mean_unchecked(k, t);
        if (t == begin)
          range.reset(g, t);
        else
          range.add(g, t);
      }
      GapEvidence ev;
      ev.arm = k + 1;
      ev.interval = m + 1;
      ev.min_gap = range.lo;
      ev.max_gap = range.hi;
      ev.argmin_t = range.lo_t;
      ev.argmax_t = range.hi_t;
      ev.small_gap = range.hi <= band + options.tolerance;
      ev.ok = range_ok(range.lo, range.hi, band, options);
      if (ev.ok && !ev.small_gap)
        ev.level = static_cast<int>(std::floor(2.0 * std::log2(range.lo / base)));
      report.ok = report.ok && ev.ok;
      report.gap_evidence.push_back(ev);
    }

    DriftEvidence drift;
    drift.interval = m + 1;
    drift.witness_t = drift.witness_t2 = begin;
    for (Step t = begin; t < end; ++t) {
      const Step stop = std::min(end, t + K + 1);
      for (Step u = t + 1; u < stop; ++u) {
        const double d = std::abs(env.best_mean_unchecked(u) - env.best_mean_unchecked(t));
        if (d > drift.max_drift) {
          drift.max_drift = d;
          drift.witness_t = t;
          drift.witness_t2 = u;
        }
      }
    }
    drift.ok = drift.max_drift <= B_star + options.tolerance;
    report.ok = report.ok && drift.ok;
    report.drift_evidence.push_back(drift);
  }
  report.change_points = std::move(change_points);
  return report;
}

PartitionReport minimal_significant_partition(const EnvironmentSpec& env, double B_star,
                                              const AssumptionOptions& options) {
  if (!(B_star >= 0.0)) throw InputError("B* must be non-negative");
  const Step T = env.horizon();
  const int K = env.num_arms();
  const double band = small_gap_band(T, B_star);

  std::vector<Step> cps{1};
  std::vector<GapRange> ranges(static_cast<std::size_t>(K));
  std::vector<GapRange> trial(static_cast<std::size_t>(K));
  Step start = 1;
  for (int k = 0; k < K; ++k)
    ranges[static_cast<std::size_t>(k)].reset(env.best_mean_unchecked(1) - env.mean_unchecked(k, 1), 1);

  for (Step t = 2; t <= T; ++t) {
    bool feasible = true;
    for (int k = 0; k < K && feasible; ++k) {
      auto& tr = trial[static_cast<std::size_t>(k)];
      tr = ranges[static_cast<std::size_t>(k)];
      tr.add(env.best_mean_unchecked(t) - env.mean_unchecked(k, t), t);
      feasible = range_ok(tr.lo, tr.hi, band, options);
    }
    const double top = env.best_mean_unchecked(t);
    for (Step u = std::max(start, t - K); u < t && feasible; ++u)
      feasible = std::abs(top - env.best_mean_unchecked(u)) <= B_star + options.tolerance;

    if (feasible) {
      ranges.swap(trial);
    } else {
      start = t;
      cps.push_back(t);
      for (int k = 0; k < K; ++k)
        ranges[static_cast<std::size_t>(k)].reset(env.best_mean_unchecked(t) - env.mean_unchecked(k, t), t);
    }
  }
  cps.push_back(T + 1);
  return validate_assumptions(env, std::move(cps), B_star, options);
}

}  // namespace nsbandit
