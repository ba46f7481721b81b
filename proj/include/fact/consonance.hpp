#ifndef FACT_CONSONANCE_HPP
#define FACT_CONSONANCE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fact/core.hpp"
#include "fact/local_tests.hpp"

namespace fact {

// Raised when a consonance check is applied to a statistic outside the
// sum family sum f(p_i) that the level/growth conditions cover.
class NotMonotoneSum : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ConsonanceVerdict { Consonant, NotConsonant, Inconclusive };

const char* to_string(ConsonanceVerdict v);

struct LevelEstimate {
  std::size_t size = 0;
  double critical = 0.0;
  double estimate = 0.0;   // Monte-Carlo P(sum f(P_i) <= c_k)
  double std_error = 0.0;
};

struct ConsonanceReport {
  std::string statistic_name;
  double alpha = 0.0;
  std::vector<LevelEstimate> levels;
  std::vector<std::size_t> growth_violations;  // sizes k with c_k > k c_1 (exact arithmetic)
  std::vector<std::string> findings;           // concrete numbers behind the verdict
  ConsonanceVerdict verdict = ConsonanceVerdict::Inconclusive;

  // Same line-oriented text shape as the simulation CSV output.
  std::string to_text() const;
};

// Consonance of the closure of sum-form tests T = sum f(p_i) with the
// given per-size critical values (sum scale): level checks by Monte
// Carlo, growth check c_k <= k c_1 in exact arithmetic. The verdict is
// decisive only when every Monte-Carlo margin exceeds 5 standard errors;
// growth violations are exact and decide immediately.
ConsonanceReport ccm_check(const MonotoneSumFn& f, std::span<const double> critical_values,
                           Alpha alpha, std::size_t samples, std::uint64_t seed);

// Same check, pulling f out of a catalog test. Min/max-style statistics
// (Bonferroni, Simes, higher criticism, ...) are outside the sum family
// and are refused with NotMonotoneSum.
ConsonanceReport ccm_check(const LocalTest& test, std::span<const double> critical_values,
                           Alpha alpha, std::size_t samples, std::uint64_t seed);

struct MeanConditionResult {
  std::string fn_name;
  double mean_estimate = 0.0;  // Monte-Carlo E f(P)
  double std_error = 0.0;
  double f_alpha = 0.0;
  bool holds = false;       // E f(P) <= f(alpha), the necessary condition
  bool conclusive = false;  // margin exceeded 5 standard errors
};

// Necessary condition for consonance at every n: E f(P) <= f(alpha).
MeanConditionResult mean_condition(const MonotoneSumFn& f, Alpha alpha, std::size_t samples,
                                   std::uint64_t seed);

// Stouffer's closure with its analytic critical values sqrt(k) qnorm(alpha):
// the growth condition fails for alpha < 1/2, so the verdict is exact.
ConsonanceReport stouffer_consonance(Alpha alpha, std::size_t n_max);

struct TruncatedProductConsonance {
  double tau = 0.0;
  double alpha = 0.0;
  double lower_bound = 0.0;  // 1 - sqrt(1 - alpha)
  bool consonant = false;    // lower_bound <= tau <= alpha
  std::string detail;
};

// Closed-form consonance window for the truncated product method.
TruncatedProductConsonance truncated_product_consonance(double tau, Alpha alpha);

}  // namespace fact

#endif
