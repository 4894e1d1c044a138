#include "nsbandit/params.hpp"

#include <bit>
#include <algorithm>
#include <cmath>

#include "nsbandit/errors.hpp"

namespace nsbandit {

namespace {

void require_positive(std::int64_t v, const char* name) {
  if (v < 1) throw InputError(std::string(name) + " must be >= 1");
}

std::int64_t checked_product(std::initializer_list<std::int64_t> factors) {
  std::int64_t out = 1;
  for (auto f : factors)
    if (__builtin_mul_overflow(out, f, &out)) throw InputError("derived M overflows 64 bits");
  return out;
}

}  // namespace

nlohmann::json CaseParams::to_json() const {
  return {{"case", std::string(1, case_tag)}, {"inputs", inputs}, {"M", M}, {"B_star", B_star}};
}

int floor_log2_sqrt(Step T) {
  require_positive(T, "T");
  const int log2_T = std::bit_width(static_cast<std::uint64_t>(T)) - 1;
  return log2_T / 2;
}

CaseParams params_case_a(std::int64_t M) {
  require_positive(M, "M");
  return {'a', {{"M", M}}, M, 0.0};
}

CaseParams params_case_b(std::int64_t M_star, int gamma_star, double u_star, int K, Step T) {
  require_positive(M_star, "M*");
  require_positive(K, "K");
  require_positive(T, "T");
  if (gamma_star < 0) throw InputError("gamma* must be >= 0");
  if (!(u_star > 0.0) || !std::isfinite(u_star)) throw InputError("u* must be positive");
  CaseParams p;
  p.case_tag = 'b';
  p.inputs = {{"M_star", M_star}, {"gamma_star", gamma_star}, {"u_star", u_star}, {"K", K}, {"T", T}};
  p.M = checked_product({M_star, gamma_star + 1, K, floor_log2_sqrt(T) + 1});
  p.B_star = u_star * K / static_cast<double>(T);
  return p;
}

CaseParams params_case_c(std::int64_t M_star, double alpha, int K, Step T) {
  require_positive(M_star, "M*");
  require_positive(K, "K");
  require_positive(T, "T");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
  CaseParams p;
  p.case_tag = 'c';
  p.inputs = {{"M_star", M_star}, {"alpha", alpha}, {"K", K}, {"T", T}};
  const double Td = static_cast<double>(T);
  p.B_star = std::pow(K * std::log(Td) / Td, 2.0 * alpha / (2.0 * alpha + 1.0));
  p.M = static_cast<std::int64_t>(std::ceil(static_cast<double>(M_star) + K * std::pow(p.B_star, 1.0 / alpha)));
  return p;
}

CaseParams params_case_d(std::int64_t upsilon_star, double B_star, int K, Step T) {
  require_positive(upsilon_star, "upsilon*");
  require_positive(K, "K");
  require_positive(T, "T");
  if (!(B_star > 0.0) || !std::isfinite(B_star)) throw InputError("B* must be positive");
  CaseParams p;
  p.case_tag = 'd';
  p.inputs = {{"upsilon_star", upsilon_star}, {"B_star", B_star}, {"K", K}, {"T", T}};
  p.M = checked_product({upsilon_star, K, floor_log2_sqrt(T) + 1});
  p.B_star = B_star;
  return p;
}

double regret_bound_prudent(double M, double B_star, int K, Step T, double C) {
  if (!(M >= 1.0) || K < 1 || T < 1 || !(B_star >= 0.0)) throw InputError("invalid bound inputs");
  const double Td = static_cast<double>(T);
  return C * std::log(Td) * std::sqrt(K * Td * M) + C * Td * B_star;
}

double regret_bound_selective(double M, double B_star, int K, Step T, double c) {
  if (!(c >= 16.0)) throw InputError("c must be >= 16");
  if (!(M >= 1.0) || K < 1 || T < 1 || !(B_star >= 0.0)) throw InputError("invalid bound inputs");
  const double Td = static_cast<double>(T);
  const double lead = std::pow(2.0, 1.5) + std::sqrt(2.0) * c * std::log(2.0 * K * Td * Td * Td);
  return lead * std::sqrt(K * Td * M) + 2.0 * K * M + 8.0 * Td * std::max(B_star, 1.0 / std::sqrt(Td)) + 1.0;
}

}  // namespace nsbandit
