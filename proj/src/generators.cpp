#include "nsbandit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "nsbandit/errors.hpp"

namespace nsbandit {

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * to_unit_interval(rng());
}

namespace {

double standard_normal(Rng& rng) {
  const double u1 = 1.0 - to_unit_interval(rng());
  const double u2 = to_unit_interval(rng());
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sorted partition 1 = c_1 < ... < c_{n+1} = T+1 with n intervals.
std::vector<Step> random_change_points(Step T, int intervals, Rng& rng) {
  if (intervals < 1) throw GenerationError("need at least one interval");
  if (static_cast<Step>(intervals) > T) throw GenerationError("more intervals than time steps");
  std::set<Step> interior;
  while (static_cast<int>(interior.size()) < intervals - 1)
    interior.insert(2 + static_cast<Step>(rng() % static_cast<std::uint64_t>(T - 1)));
  std::vector<Step> cps{1};
  cps.insert(cps.end(), interior.begin(), interior.end());
  cps.push_back(T + 1);
  return cps;
}

std::vector<Step> explicit_change_points(Step T, int M, const std::vector<Step>& interior) {
  if (static_cast<int>(interior.size()) != M - 1) {
    std::ostringstream os;
    os << "expected " << M - 1 << " interior change points, got " << interior.size();
    throw GenerationError(os.str());
  }
  std::vector<Step> cps{1};
  for (Step c : interior) {
    if (c <= cps.back() || c > T) throw GenerationError("interior change points must increase within (1, T]");
    cps.push_back(c);
  }
  cps.push_back(T + 1);
  return cps;
}

double l1_norm(const std::vector<double>& c) {
  double s = 0.0;
  for (double v : c) s += std::abs(v);
  return s;
}

}  // namespace

EnvironmentSpec gen_switching(int K, Step T, int M, const GapProfile& profile, Rng& rng,
                              const SwitchingOptions& options) {
  if (K < 2 || T < 1 || M < 1) throw GenerationError("switching: need K >= 2, T >= 1, M >= 1");
  if (static_cast<int>(profile.rows.size()) != M)
    throw GenerationError("switching: gap profile must have one row per interval");
  for (const auto& row : profile.rows) {
    if (static_cast<int>(row.size()) != K) throw GenerationError("switching: gap row size must equal K");
    if (*std::min_element(row.begin(), row.end()) != 0.0)
      throw GenerationError("switching: every gap row needs a zero entry (the best arm)");
    for (double g : row)
      if (g < 0.0 || g > options.top_mean)
        throw GenerationError("switching: gaps must lie in [0, top_mean] to keep means in [0,1]");
  }
  if (!(options.top_mean >= 0.0 && options.top_mean <= 1.0))
    throw GenerationError("switching: top_mean must lie in [0,1]");

  const std::vector<Step> cps = options.change_points.empty() && M > 1
                                    ? random_change_points(T, M, rng)
                                    : explicit_change_points(T, M, options.change_points);
  std::vector<MeanFunction> means;
  GeneratorInfo info;
  info.name = "switching";
  info.change_points = cps;
  info.parameters = {{"M", M}, {"top_mean", options.top_mean}};
  for (int k = 0; k < K; ++k) {
    std::vector<Segment> segs;
    std::vector<double> norms;
    for (int m = 0; m < M; ++m) {
      const double mu = options.top_mean - profile.rows[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
      segs.push_back({cps[static_cast<std::size_t>(m)], {mu}});
      norms.push_back(std::abs(mu));
    }
    means.emplace_back(std::move(segs));
    info.coefficient_norms.push_back(std::move(norms));
    info.degrees.push_back(0);
  }
  return EnvironmentSpec(T, std::move(means), {}, ObservationMode::mean, std::move(info));
}

EnvironmentSpec gen_local_poly(int K, Step T, int M_star, int gamma_star, double u_star, Rng& rng) {
  if (K < 2 || T < 1 || M_star < 1 || gamma_star < 0)
    throw GenerationError("local_poly: need K >= 2, T >= 1, M* >= 1, gamma* >= 0");
  if (!(u_star > 0.0)) throw GenerationError("local_poly: u* must be positive");

  const std::vector<Step> cps = random_change_points(T, M_star, rng);
  // Per segment: f(x) = c_0 + a * sum_{i>=1} w_i x^i with sum_i i|w_i| = 1, so
  // |f - c_0| <= a, |f'| <= a and the l1 norm is at most c_0 + a. Choosing
  // a <= min(1/2, u*/2) and c_0 in [a, min(1-a, u*-a)] keeps f in [0,1] and
  // the norm below u*.
  constexpr double kMargin = 1e-9;
  const double a_max = std::min(0.5, u_star / 2.0) - kMargin;
  if (a_max < 0.0) throw GenerationError("local_poly: u* too small");

  std::vector<MeanFunction> means;
  GeneratorInfo info;
  info.name = "local_poly";
  info.change_points = cps;
  info.parameters = {{"M_star", M_star}, {"gamma_star", gamma_star}, {"u_star", u_star}};
  for (int k = 0; k < K; ++k) {
    std::vector<Segment> segs;
    std::vector<double> norms;
    for (int m = 0; m < M_star; ++m) {
      std::vector<double> c(static_cast<std::size_t>(gamma_star) + 1, 0.0);
      double a = 0.0;
      if (gamma_star > 0) {
        double weight = 0.0;
        for (int i = 1; i <= gamma_star; ++i) {
          c[static_cast<std::size_t>(i)] = uniform(rng, -1.0, 1.0);
          weight += i * std::abs(c[static_cast<std::size_t>(i)]);
        }
        a = uniform(rng, 0.0, a_max);
        for (int i = 1; i <= gamma_star; ++i) c[static_cast<std::size_t>(i)] *= a / weight;
      }
      const double lo = a + kMargin;
      const double hi = std::min(1.0 - a, u_star - a) - kMargin;
      c[0] = uniform(rng, lo, std::max(lo, hi));
      norms.push_back(l1_norm(c));
      segs.push_back({cps[static_cast<std::size_t>(m)], std::move(c)});
    }
    means.emplace_back(std::move(segs));
    info.coefficient_norms.push_back(std::move(norms));
    info.degrees.push_back(gamma_star);
  }
  return EnvironmentSpec(T, std::move(means), {}, ObservationMode::mean, std::move(info));
}

namespace {

// Midpoint displacement on knots [lo, hi] with roughness exponent alpha.
void displace(std::vector<double>& y, std::size_t lo, std::size_t hi, double alpha, Rng& rng) {
  if (hi - lo < 2) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const double span = static_cast<double>(hi - lo) / static_cast<double>(y.size());
  y[mid] = 0.5 * (y[lo] + y[hi]) + 0.5 * std::pow(span, alpha) * standard_normal(rng);
  displace(y, lo, mid, alpha, rng);
  displace(y, mid, hi, alpha, rng);
}

// max over knot pairs of |y_i - y_j| / |x_i - x_j|^alpha, x_i = i * dx.
double holder_constant(const std::vector<double>& y, std::size_t lo, std::size_t hi, double dx, double alpha) {
  double worst = 0.0;
  std::vector<double> denom(hi - lo + 1);
  for (std::size_t d = 1; d <= hi - lo; ++d) denom[d] = std::pow(static_cast<double>(d) * dx, alpha);
  for (std::size_t i = lo; i <= hi; ++i)
    for (std::size_t j = i + 1; j <= hi; ++j) worst = std::max(worst, std::abs(y[j] - y[i]) / denom[j - i]);
  return worst;
}

}  // namespace

EnvironmentSpec gen_holder(int K, Step T, int M_star, double alpha, Rng& rng) {
  if (K < 2 || T < 2 || M_star < 1) throw GenerationError("holder: need K >= 2, T >= 2, M* >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw GenerationError("holder: alpha must lie in (0,1]");

  const std::vector<Step> cps = random_change_points(T, M_star, rng);
  // Knots x_j = j / (4T), j = 1..4T; arm means are read at x = t/T, i.e. j = 4t.
  const std::size_t knots = 4 * static_cast<std::size_t>(T);
  const double dx = 1.0 / static_cast<double>(knots);
  constexpr double kSafety = 0.95;

  std::vector<MeanFunction> means;
  GeneratorInfo info;
  info.name = "holder";
  info.change_points = cps;
  info.parameters = {{"M_star", M_star}, {"alpha", alpha}, {"knots", static_cast<double>(knots)}};
  for (int k = 0; k < K; ++k) {
    std::vector<double> y(knots + 1, 0.0);  // index 0 unused
    for (int m = 0; m < M_star; ++m) {
      const std::size_t lo = 4 * static_cast<std::size_t>(cps[static_cast<std::size_t>(m)]) - 3;
      const std::size_t hi = 4 * static_cast<std::size_t>(cps[static_cast<std::size_t>(m) + 1] - 1);
      y[lo] = standard_normal(rng);
      y[hi] = standard_normal(rng);
      displace(y, lo, hi, alpha, rng);
      double mean = 0.0, spread = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) mean += y[j];
      mean /= static_cast<double>(hi - lo + 1);
      for (std::size_t j = lo; j <= hi; ++j) spread = std::max(spread, std::abs(y[j] - mean));
      const double level = uniform(rng, 0.3, 0.7);
      const double holder = hi > lo ? holder_constant(y, lo, hi, dx, alpha) : 0.0;
      double scale = spread > 0.0 ? kSafety * std::min(level, 1.0 - level) / spread : 0.0;
      if (holder > 0.0) scale = std::min(scale, kSafety / holder);
      for (std::size_t j = lo; j <= hi; ++j) y[j] = level + scale * (y[j] - mean);
      if (hi > lo && holder_constant(y, lo, hi, dx, alpha) > 1.0)
        throw GenerationError("holder: chord condition failed after rescaling");
    }
    std::vector<Segment> segs;
    segs.reserve(static_cast<std::size_t>(T));
    for (Step t = 1; t <= T; ++t) segs.push_back({t, {y[4 * static_cast<std::size_t>(t)]}});
    means.emplace_back(std::move(segs));
    info.degrees.push_back(0);
  }
  return EnvironmentSpec(T, std::move(means), {}, ObservationMode::mean, std::move(info));
}

EnvironmentSpec gen_inflexion(int K, Step T, int upsilon_star, double B_star, Rng& rng) {
  if (K < 2 || T < 2 || upsilon_star < 1) throw GenerationError("inflexion: need K >= 2, T >= 2, upsilon* >= 1");
  if (!(B_star >= 0.0)) throw GenerationError("inflexion: B* must be non-negative");

  constexpr double kGapMax = 0.6;
  const std::vector<Step> cps = random_change_points(T, upsilon_star, rng);

  // mu*(t) = level + slope (t - 1), |slope| <= B*/K so any K-window drifts <= B*.
  double slope = 0.9 * uniform(rng, -1.0, 1.0) * B_star / K;
  const double room = 1.0 - kGapMax - 0.02;
  if (std::abs(slope) * static_cast<double>(T - 1) > room) slope *= room / (std::abs(slope) * static_cast<double>(T - 1));
  const double drift = slope * static_cast<double>(T - 1);
  const double level = uniform(rng, kGapMax + 0.01 + std::max(0.0, -drift), 1.0 - 0.01 - std::max(0.0, drift));
  const double top0 = level - slope;                  // coefficient of x^0
  const double top1 = slope * static_cast<double>(T);  // coefficient of x^1

  std::vector<int> best(static_cast<std::size_t>(upsilon_star));
  for (auto& b : best) b = static_cast<int>(rng() % static_cast<std::uint64_t>(K));

  std::vector<MeanFunction> means;
  GeneratorInfo info;
  info.name = "inflexion";
  info.change_points = cps;
  info.parameters = {{"upsilon_star", upsilon_star}, {"B_star", B_star}};
  for (int k = 0; k < K; ++k) {
    std::vector<Segment> segs;
    double prev = -1.0;  // gap at the end of the previous piece, -1 before the first
    for (int p = 0; p < upsilon_star; ++p) {
      const Step start = cps[static_cast<std::size_t>(p)];
      const Step len = cps[static_cast<std::size_t>(p) + 1] - start;
      double a = 0.0, z = 0.0;
      if (best[static_cast<std::size_t>(p)] != k) {
        // Each piece is monotone including the jump into it, so the gap has
        // at most upsilon*-1 direction changes overall.
        const bool up = prev == 0.0 || uniform(rng, 0.0, 1.0) < 0.5;
        if (up) {
          a = uniform(rng, std::max(prev, 0.0), kGapMax);
          z = uniform(rng, a, kGapMax);
        } else {
          a = uniform(rng, 0.0, prev < 0.0 ? kGapMax : prev);
          z = uniform(rng, 0.0, a);
        }
        if (len == 1) z = a;
      }
      prev = z;
      // Gap a + (z-a)(t-start)/(len-1) rewritten in x = t/T.
      const double d1 = len > 1 ? (z - a) * static_cast<double>(T) / static_cast<double>(len - 1) : 0.0;
      const double d0 = len > 1 ? a - (z - a) * static_cast<double>(start) / static_cast<double>(len - 1) : a;
      if (best[static_cast<std::size_t>(p)] == k)
        segs.push_back({start, {top0, top1}});
      else
        segs.push_back({start, {top0 - d0, top1 - d1}});
    }
    means.emplace_back(std::move(segs));
    info.degrees.push_back(1);
  }
  return EnvironmentSpec(T, std::move(means), {}, ObservationMode::mean, std::move(info));
}

}  // namespace nsbandit
