#include "nsbandit/prudent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsbandit/env_io.hpp"
#include "nsbandit/errors.hpp"

namespace nsbandit {

namespace {

const char* to_string(ScanMode m) { return m == ScanMode::exhaustive ? "exhaustive" : "geometric_grid"; }
const char* to_string(DetectionRule d) { return d == DetectionRule::as_printed ? "as_printed" : "symmetric"; }
const char* to_string(QuotaRule q) { return q == QuotaRule::as_printed ? "as_printed" : "lower_bound"; }

struct PairStat {
  int u, v;
  double est;
  int n;
};

}  // namespace

void PrudentParams::validate() const {
  if (M < 1) throw InputError("M must be >= 1");
  if (!(B_star >= 0.0) || !std::isfinite(B_star)) throw InputError("B* must be a finite non-negative number");
  if (!(grid_base > 1.0) || !std::isfinite(grid_base)) throw InputError("grid base must be > 1");
}

nlohmann::json PrudentParams::to_json() const {
  return {{"M", M},
          {"B_star", B_star},
          {"scan_mode", to_string(scan_mode)},
          {"grid_base", grid_base},
          {"detection_rule", to_string(detection_rule)},
          {"quota_rule", to_string(quota_rule)}};
}

ActiveSetChoice select_active_set(EpisodeLedger& ledger, const PrudentParams& params, int r) {
  const int K = ledger.num_arms();
  ActiveSetChoice out;
  out.quotas.resize(static_cast<std::size_t>(K));
  out.recencies.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const double q = ledger.exploration_quota(k, r, params.B_star, params.M, params.quota_rule);
    const Step n = ledger.recency(k, r);
    out.quotas[static_cast<std::size_t>(k - 1)] = q;
    out.recencies[static_cast<std::size_t>(k - 1)] = n;
    if (q <= static_cast<double>(n)) out.arms.push_back(k);
  }
  if (out.arms.empty()) {
    int best = 1;
    double best_slack = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= K; ++k) {
      const double slack = out.quotas[static_cast<std::size_t>(k - 1)] -
                           static_cast<double>(out.recencies[static_cast<std::size_t>(k - 1)]);
      if (slack < best_slack) {
        best_slack = slack;
        best = k;
      }
    }
    out.arms.push_back(best);
    out.forced = true;
  }
  return out;
}

std::vector<int> scan_endpoints(int rho, int r, const PrudentParams& params) {
  if (r <= rho) return r == rho ? std::vector<int>{rho} : std::vector<int>{};
  std::vector<int> e;
  if (params.scan_mode == ScanMode::exhaustive) {
    for (int j = rho; j <= r; ++j) e.push_back(j);
    return e;
  }
  e = {rho, r - 1, r};
  const int span = r - rho;
  for (double p = 1.0; p <= static_cast<double>(span); p *= params.grid_base) {
    const int step = static_cast<int>(std::ceil(p - 1e-9));
    if (step > span) break;
    e.push_back(rho + step);
    e.push_back(r - step);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

std::optional<DetectionEvent> cp_detect(const EpisodeLedger& ledger, const PrudentParams& params, int r) {
  const int rho = ledger.episode_start();
  if (r > ledger.closed_rounds() + 1) throw InputError("cp_detect reaches past the last closed round");
  if (r - rho < 1) return std::nullopt;
  const auto ends = scan_endpoints(rho, r, params);
  const double L = ledger.log_term();
  const int K = ledger.num_arms();

  // Pairs with a non-empty persistent set; S only depends on (u, v).
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      const int u = ends[i], v = ends[j];
      bool any = false;
      for (int k = 1; k <= K && !any; ++k) any = ledger.is_persistent(k, u, v);
      if (any) pairs.emplace_back(u, v);
    }

  std::vector<PairStat> stats;
  // Extremes over partners indexed by pull count, for the as-printed rule:
  // a partner with n_b >= n_a is limited by the radius at n_a, one with
  // n_b < n_a by its own radius.
  std::vector<double> suf_max, suf_min, pre_up, pre_down;
  const double slack = 1e-9;
  for (int k = 1; k <= K; ++k) {
    stats.clear();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [u, v] : pairs) {
      const int n = ledger.pull_count(k, u, v);
      if (n == 0) continue;
      const double est = ledger.gap_estimate(k, u, v).value;
      stats.push_back({u, v, est, n});
      lo = std::min(lo, est);
      hi = std::max(hi, est);
    }
    const bool as_printed = params.detection_rule == DetectionRule::as_printed;
    std::vector<PairStat> by_n;
    if (as_printed) {
      by_n = stats;
      std::sort(by_n.begin(), by_n.end(), [](const PairStat& x, const PairStat& y) { return x.n < y.n; });
      const std::size_t m = by_n.size();
      const double inf = std::numeric_limits<double>::infinity();
      suf_max.assign(m + 1, -inf);
      suf_min.assign(m + 1, inf);
      pre_up.assign(m + 1, -inf);
      pre_down.assign(m + 1, -inf);
      for (std::size_t i = m; i-- > 0;) {
        suf_max[i] = std::max(suf_max[i + 1], by_n[i].est);
        suf_min[i] = std::min(suf_min[i + 1], by_n[i].est);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const double rad = 2.0 * std::sqrt(2.0 * L / by_n[i].n);
        pre_up[i + 1] = std::max(pre_up[i], by_n[i].est - rad);
        pre_down[i + 1] = std::max(pre_down[i], -by_n[i].est - rad);
      }
    }
    for (const auto& a : stats) {
      // Cheapest possible threshold for this (u, v): any partner gives a
      // larger radius, and the symmetric rule only raises the 2*est term.
      const double rad_a = 2.0 * std::sqrt(2.0 * L / a.n);
      const double floor_rhs = 2.0 * a.est + rad_a + 2.0 * params.B_star;
      if (std::max(hi - a.est, a.est - lo) < floor_rhs) continue;
      if (as_printed) {
        const auto p = static_cast<std::size_t>(
            std::lower_bound(by_n.begin(), by_n.end(), a.n, [](const PairStat& x, int n) { return x.n < n; }) -
            by_n.begin());
        const double up = 3.0 * a.est + 2.0 * params.B_star, down = a.est + 2.0 * params.B_star;
        const bool maybe = suf_max[p] - up >= rad_a - slack || -suf_min[p] - down >= rad_a - slack ||
                           pre_up[p] >= up - slack || pre_down[p] >= down - slack;
        if (!maybe) continue;
      }
      for (const auto& b : stats) {
        const double lead = as_printed ? a.est : std::max(a.est, b.est);
        const double rhs =
            2.0 * lead + 2.0 * std::sqrt(2.0 * L / std::min(a.n, b.n)) + 2.0 * params.B_star;
        if (std::abs(a.est - b.est) >= rhs) {
          DetectionEvent ev;
          ev.round = r - 1;
          ev.time = ledger.round_start_time(r) - 1;
          ev.arm = k;
          ev.u = a.u;
          ev.v = a.v;
          ev.u2 = b.u;
          ev.v2 = b.v;
          ev.left = a.est;
          ev.right = b.est;
          ev.threshold = rhs;
          return ev;
        }
      }
    }
  }
  return std::nullopt;
}

RunTrace run_prudent(const EnvironmentSpec& env, const PrudentParams& params, const NoiseStream& noise,
                     const RunOptions& options) {
  if (env.mode() != ObservationMode::mean) throw ModeError("PrudentBandits needs a mean-observation environment");
  params.validate();
  const Step budget = resolve_budget(env, options);
  const Step offset = options.first_time - 1;
  EpisodeLedger ledger(env.num_arms(), env.horizon());

  RunTrace trace;
  trace.policy = "prudent";
  trace.mode = env.mode();
  trace.seed = noise.seed();
  trace.env_hash = environment_hash(env);
  trace.params = params.to_json();
  trace.episodes.push_back({1, 1, options.first_time});

  for (int r = 1; ledger.pulls() < budget; ++r) {
    auto choice = select_active_set(ledger, params, r);
    if (choice.forced) ++trace.forced_progress;
    const auto arms = choice.arms;
    ledger.open_round(std::move(choice.arms), std::move(choice.quotas), std::move(choice.recencies));
    for (int k : arms) {
      if (ledger.pulls() >= budget) break;
      const Step t = offset + ledger.pulls() + 1;
      const double x = sample_reward(env, k, t, noise);
      ledger.record(k, x);
      const double regret = gap_at(env, k, t);
      trace.pulls.push_back({t, k, x, regret, r, ledger.episode_index()});
      trace.total_regret += regret;
    }
    ledger.close_round();
    trace.active_set_sizes.push_back(static_cast<int>(arms.size()));
    if (ledger.pulls() >= budget) break;
    if (auto ev = cp_detect(ledger, params, r + 1)) {
      ev->time += offset;
      trace.detections.push_back(*ev);
      ledger.start_episode(r + 1);
      trace.episodes.push_back({ledger.episode_index(), r + 1, offset + ledger.pulls() + 1});
    }
  }
  return trace;
}

}  // namespace nsbandit
