#pragma once

// Environment generators for the four structural cases:
//   a) piecewise-constant means (switching bandits)
//   b) piecewise polynomials of degree <= gamma* with l1 coefficient norm <= u*
//   c) piecewise alpha-Hoelder curves
//   d) gaps with at most upsilon*-1 inflexion points and a slowly drifting mu*
//
// Every generator returns an environment with zero noise and mean
// observations; use EnvironmentSpec::with_noise / with_mode to change that.
// The ground-truth structure is recorded in EnvironmentSpec::info().

#include <random>
#include <vector>

#include "nsbandit/environment.hpp"

namespace nsbandit {

using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) from the top 53 bits of one draw; independent
/// of the standard library's distribution implementations.
double uniform(Rng& rng, double lo, double hi);

struct GapProfile {
  /// One row per interval, K gaps per row; every row must contain a zero.
  std::vector<std::vector<double>> rows;
};

struct SwitchingOptions {
  /// Mean of the best arm on every interval; arm means are top_mean - gap.
  double top_mean = 0.9;
  /// Interior change points c_2 < ... < c_M. Drawn uniformly when empty.
  std::vector<Step> change_points;
};

EnvironmentSpec gen_switching(int K, Step T, int M, const GapProfile& profile, Rng& rng,
                              const SwitchingOptions& options = {});

EnvironmentSpec gen_local_poly(int K, Step T, int M_star, int gamma_star, double u_star, Rng& rng);

EnvironmentSpec gen_holder(int K, Step T, int M_star, double alpha, Rng& rng);

EnvironmentSpec gen_inflexion(int K, Step T, int upsilon_star, double B_star, Rng& rng);

}  // namespace nsbandit
