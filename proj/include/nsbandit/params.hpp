#pragma once

// Parameter choices (M, B*) for the four structural cases and the reference
// regret-bound curves.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "nsbandit/environment.hpp"

namespace nsbandit {

struct CaseParams {
  char case_tag = 'a';
  nlohmann::json inputs;  // structural inputs as given
  std::int64_t M = 1;
  double B_star = 0.0;

  nlohmann::json to_json() const;
};

/// floor(log2(sqrt(T))) in integer arithmetic; equals floor(floor(log2 T) / 2).
int floor_log2_sqrt(Step T);

CaseParams params_case_a(std::int64_t M);
/// M = M*(gamma*+1) K (floor(log2 sqrt T) + 1), B* = u* K / T.
CaseParams params_case_b(std::int64_t M_star, int gamma_star, double u_star, int K, Step T);
/// B* = (K ln T / T)^(2a/(2a+1)), M = ceil(M* + K (B*)^(1/a)).
CaseParams params_case_c(std::int64_t M_star, double alpha, int K, Step T);
/// M = upsilon* K (floor(log2 sqrt T) + 1); B* passed through.
CaseParams params_case_d(std::int64_t upsilon_star, double B_star, int K, Step T);

/// C ln(T) sqrt(K T M) + C T B*.
double regret_bound_prudent(double M, double B_star, int K, Step T, double C);
/// (2^{3/2} + 2^{1/2} c ln(2KT^3)) sqrt(KTM) + 2KM + 8T max(B*, T^{-1/2}) + 1, c >= 16.
double regret_bound_selective(double M, double B_star, int K, Step T, double c);

}  // namespace nsbandit
