#include <doctest.h>

#include <cmath>
#include <random>

#include "nsbandit/errors.hpp"
#include "nsbandit/selective.hpp"

using namespace nsbandit;

namespace {

EnvironmentSpec gap_env(Step T, std::vector<MeanFunction> means, NoiseModel noise = {}) {
  return EnvironmentSpec(T, std::move(means), noise).with_mode(ObservationMode::gap);
}

// Plain re-simulation on noiseless gap observations: per episode, arm k is
// dropped once mean(gap) - sqrt(L / 2n) - 2 max(T^-1/2, B*) > 0 on [rho, r).
struct Replay {
  std::vector<int> arms;    // arm per step
  std::vector<int> resets;  // rounds at which a new episode starts
  double regret = 0.0;
};

Replay replay(const EnvironmentSpec& env, double B_star) {
  const int K = env.num_arms();
  const Step T = env.horizon();
  const double L = std::log(2.0 * K * std::pow(static_cast<double>(T), 3));
  const double band = 2.0 * std::max(1.0 / std::sqrt(static_cast<double>(T)), B_star);
  Replay out;
  std::vector<double> sum(static_cast<std::size_t>(K), 0.0);
  std::vector<int> n(static_cast<std::size_t>(K), 0);
  std::vector<bool> out_set(static_cast<std::size_t>(K), false);
  Step t = 1;
  for (int r = 1; t <= T; ++r) {
    std::vector<int> active;
    for (int k = 1; k <= K; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      if (!out_set[i] && n[i] > 0 && sum[i] / n[i] - std::sqrt(L / (2.0 * n[i])) - band > 0.0) out_set[i] = true;
      if (!out_set[i]) active.push_back(k);
    }
    if (active.empty()) {
      out.resets.push_back(r);
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(n.begin(), n.end(), 0);
      std::fill(out_set.begin(), out_set.end(), false);
      continue;
    }
    for (int k : active) {
      if (t > T) break;
      const double g = gap_at(env, k, t);
      sum[static_cast<std::size_t>(k - 1)] += g;
      ++n[static_cast<std::size_t>(k - 1)];
      out.arms.push_back(k);
      out.regret += g;
      ++t;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("noiseless two-arm elimination: 16 pulls, regret 14.4") {
  const auto env = gap_env(100, {MeanFunction::constant(0.95), MeanFunction::constant(0.05)});
  const auto trace = run_selective(env, SelectiveParams{}, NoiseStream(1));
  CHECK(trace.pull_count(2) == 16);
  CHECK(trace.pull_count(1) == 84);
  CHECK(trace.total_regret == doctest::Approx(14.4).epsilon(1e-12));
  CHECK(trace.num_episodes() == 1);
  CHECK(trace.mode == ObservationMode::gap);
  // Threshold: the smallest n with sqrt(ln(4e6) / 2n) + 0.2 < 0.9.
  int n = 1;
  while (std::sqrt(std::log(4e6) / (2.0 * n)) + 0.2 >= 0.9) ++n;
  CHECK(n == 16);
}

TEST_CASE("zero gaps: nothing is eliminated") {
  const auto env = gap_env(200, {MeanFunction::constant(0.5), MeanFunction::constant(0.5), MeanFunction::constant(0.5)},
                           {NoiseKind::bernoulli, 0.0});
  const auto trace = run_selective(env, SelectiveParams{}, NoiseStream(4));
  CHECK(trace.total_regret == 0.0);
  for (int s : trace.active_set_sizes) CHECK(s == 3);
}

TEST_CASE("switching gaps: reset round matches a plain replay") {
  for (Step T : {200, 400, 1000}) {
    const auto env = gap_env(T, {MeanFunction({{1, {0.95}}, {T / 2 + 1, {0.05}}}),
                                 MeanFunction({{1, {0.05}}, {T / 2 + 1, {0.95}}})});
    const auto trace = run_selective(env, SelectiveParams{}, NoiseStream(0));
    const auto expect = replay(env, 0.0);
    REQUIRE(trace.pulls.size() == expect.arms.size());
    for (std::size_t i = 0; i < trace.pulls.size(); ++i) REQUIRE(trace.pulls[i].arm == expect.arms[i]);
    CHECK(trace.total_regret == doctest::Approx(expect.regret));
    REQUIRE(trace.episodes.size() == expect.resets.size() + 1);
    REQUIRE_FALSE(expect.resets.empty());
    for (std::size_t e = 0; e < expect.resets.size(); ++e) CHECK(trace.episodes[e + 1].round == expect.resets[e]);
    // After the reset both arms are back, and arm 2 is never dropped again.
    const int reset = expect.resets.front();
    CHECK(trace.active_set_sizes[static_cast<std::size_t>(reset - 1)] == 0);
    CHECK(trace.active_set_sizes[static_cast<std::size_t>(reset)] == 2);
    CHECK(trace.pulls.back().arm == 2);
  }
}

TEST_CASE("incremental elimination agrees with the recomputed set") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int K = 2 + static_cast<int>(rng() % 3);
    EpisodeLedger ledger(K, 50);
    SelectiveParams p;
    p.B_star = rep % 2 == 0 ? 0.0 : 0.05;
    std::vector<double> gap(static_cast<std::size_t>(K));
    for (auto& g : gap) g = u(rng);
    gap[0] = 0.0;
    SelectiveEliminator elim(K);
    std::vector<int> previous;
    for (int r = 1; r <= 60; ++r) {
      const auto inc = elim.update(ledger, p, r);
      CHECK(inc == selective_active_set(ledger, p, r));
      if (r > 1)
        for (int k : inc) CHECK(std::find(previous.begin(), previous.end(), k) != previous.end());
      previous = inc;
      ledger.open_round(inc);
      for (int k : inc) ledger.record(k, -std::clamp(gap[static_cast<std::size_t>(k - 1)] + 0.3 * (u(rng) - 0.5), 0.0, 1.0));
      ledger.close_round();
    }
  }
}

TEST_CASE("active sets never grow between resets") {
  const Step T = 3000;
  const auto env = gap_env(T,
                           {MeanFunction({{1, {0.9}}, {1001, {0.2}}, {2001, {0.9}}}),
                            MeanFunction({{1, {0.3}}, {1001, {0.9}}, {2001, {0.3}}}), MeanFunction::constant(0.5)},
                           {NoiseKind::bernoulli, 0.0});
  const auto trace = run_selective(env, SelectiveParams{}, NoiseStream(9));
  REQUIRE(static_cast<Step>(trace.pulls.size()) == T);
  for (std::size_t i = 1; i < trace.active_set_sizes.size(); ++i) {
    const int prev = trace.active_set_sizes[i - 1], cur = trace.active_set_sizes[i];
    if (prev == 0) CHECK(cur == 3);
    else if (cur != 0) CHECK(cur <= prev);
  }
  CHECK(trace.num_episodes() >= 2);
}

TEST_CASE("suffix replay and input checks") {
  const auto env = gap_env(300, {MeanFunction::constant(0.9), MeanFunction::constant(0.4)});
  RunOptions o;
  o.first_time = 101;
  const auto trace = run_selective(env, SelectiveParams{}, NoiseStream(2), o);
  CHECK(trace.pulls.size() == 200);
  CHECK(trace.pulls.front().t == 101);

  CHECK_THROWS_AS(run_selective(env.with_mode(ObservationMode::mean), SelectiveParams{}, NoiseStream(1)), ModeError);
  SelectiveParams bad;
  bad.B_star = -0.5;
  CHECK_THROWS_AS(run_selective(env, bad, NoiseStream(1)), InputError);
}
