#ifndef FACT_FUSION_HPP
#define FACT_FUSION_HPP

#include <memory>

#include "fact/engine.hpp"
#include "fact/local_tests.hpp"

namespace fact {

// Plan recipe for the small/large split: the small-subset test handles
// sizes up to n - sparsity + 1, the large-subset test everything above.
// With the defaults (Simes below, higher criticism above) this is the
// Simes-HC fusion rule.
struct FusionSpec {
  std::size_t n = 0;
  std::size_t sparsity = 0;  // s, the caller's sparsity guess; 1 <= s <= n
  std::shared_ptr<const LocalTest> small_test;  // nullptr selects Simes
  std::shared_ptr<const LocalTest> large_test;  // required when sparsity >= 2

  std::size_t cutoff() const { return n - sparsity + 1; }
  void validate() const;
};

// Builds the fusion plan. When the large test is Monte-Carlo calibrated,
// its table must cover every size above the cutoff (a calibration gap is
// reported as CalibrationMissing).
RulePlan simes_hc_plan(const FusionSpec& spec, Alpha alpha);

// The same test at every size; baseline closures (all-Simes, all-Fisher).
RulePlan uniform_plan(std::shared_ptr<const LocalTest> test, std::size_t n);

}  // namespace fact

#endif
