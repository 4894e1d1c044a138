#include <doctest.h>

#include <cmath>

#include "nsbandit/assumptions.hpp"
#include "nsbandit/errors.hpp"
#include "nsbandit/generators.hpp"
#include "nsbandit/params.hpp"

using namespace nsbandit;

namespace {

void check_ranges(const EnvironmentSpec& env) {
  for (Step t = 1; t <= env.horizon(); ++t) {
    for (int k = 1; k <= env.num_arms(); ++k) {
      const double m = mean_at(env, k, t);
      REQUIRE(m >= 0.0);
      REQUIRE(m <= 1.0);
    }
    REQUIRE(gap_at(env, best_arm_at(env, t), t) == 0.0);
  }
}

int direction_changes(const std::vector<double>& v) {
  int changes = 0, last = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    const int s = d > 1e-12 ? 1 : (d < -1e-12 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

TEST_CASE("switching environments") {
  Rng rng(1);
  const auto stationary = gen_switching(2, 100, 1, GapProfile{{{0.0, 0.5}}}, rng);
  CHECK(stationary.info()->change_points == std::vector<Step>{1, 101});
  CHECK(gap_at(stationary, 2, 50) == doctest::Approx(0.5));
  CHECK(validate_assumptions(stationary, stationary.info()->change_points, 0.0).ok);

  for (int rep = 0; rep < 20; ++rep) {
    const int K = 2 + rep % 3, M = 1 + rep % 4;
    GapProfile profile;
    for (int m = 0; m < M; ++m) {
      std::vector<double> row;
      for (int k = 0; k < K; ++k) row.push_back(k == (m + rep) % K ? 0.0 : uniform(rng, 0.1, 0.8));
      profile.rows.push_back(row);
    }
    const auto env = gen_switching(K, 300, M, profile, rng);
    check_ranges(env);
    CHECK(validate_assumptions(env, env.info()->change_points, 0.0).ok);
    CHECK(minimal_significant_partition(env, 0.0).num_intervals() <= M);
  }

  SwitchingOptions fixed;
  fixed.change_points = {51};
  const auto two = gen_switching(2, 100, 2, GapProfile{{{0.0, 0.9}, {0.9, 0.0}}}, rng, fixed);
  CHECK(two.info()->change_points == std::vector<Step>{1, 51, 101});
  CHECK(best_arm_at(two, 50) == 1);
  CHECK(best_arm_at(two, 51) == 2);

  CHECK_THROWS_AS(gen_switching(2, 100, 1, GapProfile{{{0.3, 0.5}}}, rng), GenerationError);
  CHECK_THROWS_AS(gen_switching(2, 100, 2, GapProfile{{{0.0, 0.5}}}, rng), GenerationError);
  CHECK_THROWS_AS(gen_switching(2, 100, 1, GapProfile{{{0.0, 0.95}}}, rng), GenerationError);
}

TEST_CASE("local polynomial environments") {
  Rng rng(2);
  const auto flat = gen_local_poly(3, 200, 3, 0, 0.8, rng);
  for (const auto& mean : flat.means()) CHECK(mean.degree() == 0);

  for (int rep = 0; rep < 10; ++rep) {
    const int K = 2 + rep % 2, M_star = 1 + rep % 3, gamma = rep % 4;
    const double u = 0.4 + 0.1 * (rep % 5);
    const Step T = 512;
    const auto env = gen_local_poly(K, T, M_star, gamma, u, rng);
    check_ranges(env);
    for (const auto& arm : env.info()->coefficient_norms)
      for (double n : arm) CHECK(n <= u);
    for (int k = 1; k <= K; ++k) {
      const auto& segs = env.means()[static_cast<std::size_t>(k - 1)].segments();
      for (const auto& s : segs) {
        double l1 = 0.0;
        for (double c : s.coefficients) l1 += std::abs(c);
        CHECK(l1 <= u);
      }
    }
    const auto p = params_case_b(M_star, gamma, u, K, T);
    const auto part = minimal_significant_partition(env, p.B_star);
    CHECK(part.ok);
    CHECK(part.num_intervals() <= p.M);
  }
  CHECK_THROWS_AS(gen_local_poly(2, 100, 1, 1, 0.0, rng), GenerationError);
}

TEST_CASE("Holder environments satisfy the chord condition") {
  Rng rng(3);
  for (double alpha : {0.3, 0.6, 1.0}) {
    const Step T = 300;
    const auto env = gen_holder(2, T, 2, alpha, rng);
    check_ranges(env);
    const auto& cps = env.info()->change_points;
    for (int k = 1; k <= 2; ++k)
      for (std::size_t m = 0; m + 1 < cps.size(); ++m)
        for (Step s = cps[m]; s < cps[m + 1]; ++s)
          for (Step t = s + 1; t < cps[m + 1]; ++t) {
            const double dx = static_cast<double>(t - s) / static_cast<double>(T);
            REQUIRE(std::abs(mean_at(env, k, t) - mean_at(env, k, s)) <= std::pow(dx, alpha) + 1e-12);
          }
    const auto p = params_case_c(2, alpha, 2, T);
    const auto part = minimal_significant_partition(env, p.B_star);
    CHECK(part.ok);
    CHECK(part.num_intervals() <= 2 + 2 * std::pow(p.B_star, -1.0 / alpha));
  }
  CHECK_THROWS_AS(gen_holder(2, 100, 1, 1.5, rng), GenerationError);
}

TEST_CASE("inflexion environments have few monotonicity changes") {
  Rng rng(4);
  for (int rep = 0; rep < 12; ++rep) {
    const int K = 2 + rep % 3, ups = 1 + rep % 4;
    const double B = 0.005 * (1 + rep % 4);
    const Step T = 400;
    const auto env = gen_inflexion(K, T, ups, B, rng);
    check_ranges(env);
    for (int k = 1; k <= K; ++k) {
      std::vector<double> gaps;
      for (Step t = 1; t <= T; ++t) gaps.push_back(gap_at(env, k, t));
      CHECK(direction_changes(gaps) <= ups - 1);
    }
    const auto p = params_case_d(ups, B, K, T);
    const auto part = minimal_significant_partition(env, B);
    CHECK(part.ok);
    CHECK(part.num_intervals() <= p.M);
  }
}
