#pragma once

// Ground-truth non-stationary environments.
//
// Conventions used across the library: arms are numbered 1..K and time steps
// 1..T. Mean functions are polynomials in the rescaled time x = t/T, given
// piecewise on left-closed segments [start_m, start_{m+1}).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsbandit/counter_rng.hpp"

namespace nsbandit {

using Step = std::int64_t;

struct Segment {
  Step start = 1;
  /// Ascending powers of x = t/T.
  std::vector<double> coefficients;

  bool operator==(const Segment&) const = default;
};

class MeanFunction {
 public:
  MeanFunction() = default;
  /// Throws InputError unless starts are strictly increasing from 1 and every
  /// segment has at least one coefficient.
  explicit MeanFunction(std::vector<Segment> segments);

  static MeanFunction constant(double value);

  /// Horner evaluation of the segment containing t. No range clamping.
  double evaluate(Step t, Step horizon) const;

  std::span<const Segment> segments() const noexcept { return segments_; }
  /// Largest polynomial degree over all segments.
  int degree() const noexcept;

  bool operator==(const MeanFunction&) const = default;

 private:
  std::vector<Segment> segments_;
};

enum class NoiseKind { none, bernoulli, truncated_gaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  /// Only used by truncated_gaussian. Clipping to the legal range biases the
  /// mean near the boundaries.
  double sigma = 0.0;

  bool operator==(const NoiseModel&) const = default;
};

enum class ObservationMode { mean, gap };

/// Structural ground truth recorded by the case generators.
struct GeneratorInfo {
  std::string name;                 // "switching", "local_poly", "holder", "inflexion"
  std::vector<Step> change_points;  // 1 = c_1 < ... < c_M < c_{M+1} = T+1
  std::map<std::string, double> parameters;
  std::vector<std::vector<double>> coefficient_norms;  // [arm][segment], l1 norms
  std::vector<int> degrees;                            // per arm

  bool operator==(const GeneratorInfo&) const = default;
};

class EnvironmentSpec {
 public:
  /// Validates shape and that every mean stays in [0,1] on [1,T].
  EnvironmentSpec(Step horizon, std::vector<MeanFunction> means, NoiseModel noise = {},
                  ObservationMode mode = ObservationMode::mean,
                  std::optional<GeneratorInfo> info = std::nullopt);

  int num_arms() const noexcept { return static_cast<int>(means_.size()); }
  Step horizon() const noexcept { return horizon_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  ObservationMode mode() const noexcept { return mode_; }
  const std::vector<MeanFunction>& means() const noexcept { return means_; }
  const std::optional<GeneratorInfo>& info() const noexcept { return info_; }

  /// Same arms and structure, different observation model.
  EnvironmentSpec with_noise(NoiseModel noise) const;
  EnvironmentSpec with_mode(ObservationMode mode) const;

  // Unchecked accessors over the precomputed tables (0-based arm, 1-based t).
  double mean_unchecked(int arm0, Step t) const noexcept {
    return table_[static_cast<std::size_t>(t - 1) * means_.size() + static_cast<std::size_t>(arm0)];
  }
  double best_mean_unchecked(Step t) const noexcept { return best_mean_[static_cast<std::size_t>(t - 1)]; }
  int best_arm_unchecked(Step t) const noexcept { return best_arm_[static_cast<std::size_t>(t - 1)]; }

  bool operator==(const EnvironmentSpec& other) const;

 private:
  Step horizon_;
  std::vector<MeanFunction> means_;
  NoiseModel noise_;
  ObservationMode mode_;
  std::optional<GeneratorInfo> info_;

  std::vector<double> table_;      // row-major [t][arm]
  std::vector<double> best_mean_;  // mu*(t)
  std::vector<int> best_arm_;      // 1-based, lowest index on ties
};

/// mu_k(t). Throws InputError for k outside [1,K] or t outside [1,T].
double mean_at(const EnvironmentSpec& env, int k, Step t);
/// Delta_k(t) = mu*(t) - mu_k(t).
double gap_at(const EnvironmentSpec& env, int k, Step t);
/// argmax_k mu_k(t), lowest index on ties.
int best_arm_at(const EnvironmentSpec& env, Step t);

/// One noisy observation of arm k at time t. In mean mode the draw has
/// expectation mu_k(t) and lies in [0,1]; in gap mode it has expectation
/// -Delta_k(t) and its negation lies in [0,1].
double sample_reward(const EnvironmentSpec& env, int k, Step t, const NoiseStream& noise);

std::string to_string(ObservationMode mode);
std::string to_string(NoiseKind kind);

}  // namespace nsbandit
