#include "nsbandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nsbandit/errors.hpp"

namespace nsbandit {

MeanFunction::MeanFunction(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw InputError("mean function needs at least one segment");
  if (segments_.front().start != 1) throw InputError("first segment must start at t=1");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].coefficients.empty()) throw InputError("segment without coefficients");
    if (i > 0 && segments_[i].start <= segments_[i - 1].start)
      throw InputError("segment starts must be strictly increasing");
  }
}

MeanFunction MeanFunction::constant(double value) {
  return MeanFunction({Segment{1, {value}}});
}

double MeanFunction::evaluate(Step t, Step horizon) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](Step v, const Segment& s) { return v < s.start; });
  const Segment& seg = *std::prev(it);
  const double x = static_cast<double>(t) / static_cast<double>(horizon);
  double acc = 0.0;
  for (auto c = seg.coefficients.rbegin(); c != seg.coefficients.rend(); ++c) acc = acc * x + *c;
  return acc;
}

int MeanFunction::degree() const noexcept {
  int d = 0;
  for (const auto& s : segments_) d = std::max(d, static_cast<int>(s.coefficients.size()) - 1);
  return d;
}

EnvironmentSpec::EnvironmentSpec(Step horizon, std::vector<MeanFunction> means, NoiseModel noise,
                                 ObservationMode mode, std::optional<GeneratorInfo> info)
    : horizon_(horizon), means_(std::move(means)), noise_(noise), mode_(mode), info_(std::move(info)) {
  if (horizon_ < 1) throw InputError("horizon T must be >= 1");
  if (means_.size() < 2) throw InputError("need at least K=2 arms");
  if (noise_.kind == NoiseKind::truncated_gaussian && !(noise_.sigma > 0.0))
    throw InputError("truncated gaussian noise needs sigma > 0");
  const std::size_t K = means_.size();
  table_.resize(static_cast<std::size_t>(horizon_) * K);
  best_mean_.resize(static_cast<std::size_t>(horizon_));
  best_arm_.resize(static_cast<std::size_t>(horizon_));
  for (Step t = 1; t <= horizon_; ++t) {
    double best = -1.0;
    int best_k = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const double mu = means_[k].evaluate(t, horizon_);
      if (!(mu >= 0.0 && mu <= 1.0)) {
        std::ostringstream os;
        os << "mean of arm " << (k + 1) << " at t=" << t << " is " << mu << ", outside [0,1]";
        throw InputError(os.str());
      }
      table_[static_cast<std::size_t>(t - 1) * K + k] = mu;
      if (mu > best) {
        best = mu;
        best_k = static_cast<int>(k) + 1;
      }
    }
    best_mean_[static_cast<std::size_t>(t - 1)] = best;
    best_arm_[static_cast<std::size_t>(t - 1)] = best_k;
  }
}

EnvironmentSpec EnvironmentSpec::with_noise(NoiseModel noise) const {
  EnvironmentSpec copy = *this;
  if (noise.kind == NoiseKind::truncated_gaussian && !(noise.sigma > 0.0))
    throw InputError("truncated gaussian noise needs sigma > 0");
  copy.noise_ = noise;
  return copy;
}

EnvironmentSpec EnvironmentSpec::with_mode(ObservationMode mode) const {
  EnvironmentSpec copy = *this;
  copy.mode_ = mode;
  return copy;
}

bool EnvironmentSpec::operator==(const EnvironmentSpec& other) const {
  return horizon_ == other.horizon_ && means_ == other.means_ && noise_ == other.noise_ &&
         mode_ == other.mode_ && info_ == other.info_;
}

namespace {

void check_arm_time(const EnvironmentSpec& env, int k, Step t) {
  if (k < 1 || k > env.num_arms()) {
    std::ostringstream os;
    os << "arm index " << k << " outside [1," << env.num_arms() << "]";
    throw InputError(os.str());
  }
  if (t < 1 || t > env.horizon()) {
    std::ostringstream os;
    os << "time step " << t << " outside [1," << env.horizon() << "]";
    throw InputError(os.str());
  }
}

double truncated_gaussian(double center, double sigma, const std::array<double, 2>& u) {
  // Box-Muller on (0,1] x [0,1).
  const double r = std::sqrt(-2.0 * std::log(1.0 - u[0]));
  const double z = r * std::cos(2.0 * std::numbers::pi * u[1]);
  return std::clamp(center + sigma * z, 0.0, 1.0);
}

}  // namespace

double mean_at(const EnvironmentSpec& env, int k, Step t) {
  check_arm_time(env, k, t);
  return env.mean_unchecked(k - 1, t);
}

double gap_at(const EnvironmentSpec& env, int k, Step t) {
  check_arm_time(env, k, t);
  return env.best_mean_unchecked(t) - env.mean_unchecked(k - 1, t);
}

int best_arm_at(const EnvironmentSpec& env, Step t) {
  check_arm_time(env, 1, t);
  return env.best_arm_unchecked(t);
}

double sample_reward(const EnvironmentSpec& env, int k, Step t, const NoiseStream& noise) {
  check_arm_time(env, k, t);
  const double mu = env.mean_unchecked(k - 1, t);
  const double gap = env.best_mean_unchecked(t) - mu;
  const bool gap_mode = env.mode() == ObservationMode::gap;
  // Mean mode observes a draw centred on mu; gap mode observes the negation of
  // a draw centred on the gap.
  const double center = gap_mode ? gap : mu;
  double draw = center;
  switch (env.noise().kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::bernoulli:
      draw = noise.uniforms(k, t)[0] < center ? 1.0 : 0.0;
      break;
    case NoiseKind::truncated_gaussian:
      draw = truncated_gaussian(center, env.noise().sigma, noise.uniforms(k, t));
      break;
  }
  return gap_mode ? -draw : draw;
}

std::string to_string(ObservationMode mode) { return mode == ObservationMode::mean ? "mean" : "gap"; }

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::bernoulli:
      return "bernoulli";
    case NoiseKind::truncated_gaussian:
      return "truncated_gaussian";
  }
  return "none";
}

}  // namespace nsbandit
