#include <doctest.h>

#include <cmath>
#include <random>

#include "nsbandit/assumptions.hpp"
#include "nsbandit/errors.hpp"
#include "oracles.hpp"

using namespace nsbandit;

namespace {

constexpr double kStrict = 1.189207115002721;  // 2^{1/4}

EnvironmentSpec two_arm(MeanFunction a, MeanFunction b, Step T) { return EnvironmentSpec(T, {std::move(a), std::move(b)}); }

}  // namespace

TEST_CASE("stationary environment validates with one interval") {
  const auto env = two_arm(MeanFunction::constant(0.9), MeanFunction::constant(0.4), 100);
  const auto rep = validate_assumptions(env, {1, 101}, 0.0);
  CHECK(rep.ok);
  CHECK(rep.num_intervals() == 1);
  CHECK(minimal_significant_partition(env, 0.0).num_intervals() == 1);
}

TEST_CASE("a gap jump needs its own change point") {
  // Arm 2's gap goes 0.1 -> 0.9 at t = 51.
  const auto env = two_arm(MeanFunction::constant(0.95), MeanFunction({{1, {0.85}}, {51, {0.05}}}), 100);
  CHECK(validate_assumptions(env, {1, 51, 101}, 0.0).ok);
  const auto bad = validate_assumptions(env, {1, 101}, 0.0);
  CHECK_FALSE(bad.ok);
  bool arm2_failed = false;
  for (const auto& g : bad.gap_evidence)
    if (g.arm == 2 && !g.ok) {
      arm2_failed = true;
      CHECK(g.max_gap / g.min_gap == doctest::Approx(9.0));
    }
  CHECK(arm2_failed);
  const auto greedy = minimal_significant_partition(env, 0.0);
  CHECK(greedy.ok);
  CHECK(greedy.change_points == std::vector<Step>{1, 51, 101});
}

TEST_CASE("linear gap 0 -> 0.8 over T = 100") {
  const auto env = two_arm(MeanFunction::constant(0.9), MeanFunction({{1, {0.9, -0.8}}}), 100);
  CHECK_FALSE(validate_assumptions(env, {1, 101}, 0.0).ok);
  CHECK_FALSE(oracle::interval_ok(env, 1, 101, 0.0, kStrict));

  const auto greedy = minimal_significant_partition(env, 0.0);
  CHECK(greedy.ok);
  const int dp = oracle::min_partition_dp(env, 0.0, kStrict);
  CHECK(greedy.num_intervals() <= 2 * dp);
  // The predicate is inherited by sub-intervals, so maximal greedy extension
  // is in fact optimal.
  CHECK(greedy.num_intervals() == dp);
}

TEST_CASE("greedy partition matches the DP oracle on random small environments") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    const Step T = 12 + static_cast<Step>(rng() % 12);
    const int K = 2 + static_cast<int>(rng() % 2);
    std::vector<MeanFunction> means;
    for (int k = 0; k < K; ++k) {
      std::vector<Segment> segs{{1, {u(rng) * 0.5, u(rng) * 0.5}}};
      const Step cut = 2 + static_cast<Step>(rng() % static_cast<std::uint64_t>(T - 2));
      segs.push_back({cut, {u(rng), 0.0}});
      means.emplace_back(std::move(segs));
    }
    const EnvironmentSpec env(T, std::move(means));
    const double B = rep % 3 == 0 ? 0.0 : 0.05 * u(rng);
    const double ratio = rep % 2 == 0 ? kStrict : 2.0;
    AssumptionOptions opts;
    opts.ratio_bound = ratio;
    const auto greedy = minimal_significant_partition(env, B, opts);
    CHECK(greedy.ok);
    CHECK(greedy.num_intervals() == oracle::min_partition_dp(env, B, ratio));
    // Every interval of the greedy result is feasible for the oracle too.
    for (std::size_t i = 0; i + 1 < greedy.change_points.size(); ++i)
      CHECK(oracle::interval_ok(env, greedy.change_points[i], greedy.change_points[i + 1], B, ratio));
  }
}

TEST_CASE("drift of the best mean is checked within K-windows") {
  // mu* rises by 0.01 per step; K = 2 so pairs at distance 2 drift 0.02.
  const auto env = two_arm(MeanFunction({{1, {0.1, 0.5}}}), MeanFunction({{1, {0.1, 0.5}}}), 50);
  CHECK(validate_assumptions(env, {1, 51}, 0.02 + 1e-9).ok);
  const auto rep = validate_assumptions(env, {1, 51}, 0.015);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.drift_evidence.front().ok);
  CHECK(rep.drift_evidence.front().max_drift == doctest::Approx(0.02));
  CHECK(minimal_significant_partition(env, 0.015).ok);
}

TEST_CASE("zero gaps fall under the small-gap branch") {
  const auto env = two_arm(MeanFunction::constant(0.5), MeanFunction::constant(0.5), 20);
  const auto rep = validate_assumptions(env, {1, 21}, 0.0);
  CHECK(rep.ok);
  for (const auto& g : rep.gap_evidence) CHECK(g.small_gap);
}

TEST_CASE("invalid partitions are rejected") {
  const auto env = two_arm(MeanFunction::constant(0.9), MeanFunction::constant(0.4), 10);
  CHECK_THROWS_AS(validate_assumptions(env, {1, 10}, 0.0), InputError);
  CHECK_THROWS_AS(validate_assumptions(env, {2, 11}, 0.0), InputError);
  CHECK_THROWS_AS(validate_assumptions(env, {1, 5, 5, 11}, 0.0), InputError);
  CHECK_THROWS_AS(validate_assumptions(env, {1, 11}, -0.1), InputError);
  // Length-1 intervals are allowed.
  CHECK(validate_assumptions(env, {1, 2, 11}, 0.0).ok);
}
