#ifndef FACT_ENGINE_HPP
#define FACT_ENGINE_HPP

#include <memory>
#include <vector>

#include "fact/core.hpp"
#include "fact/local_tests.hpp"

namespace fact {

// Assigns one local test to every subset size 1..n. Plans are cheap to
// copy (shared test instances) and immutable once built.
class RulePlan {
 public:
  explicit RulePlan(std::vector<std::shared_ptr<const LocalTest>> tests_by_size);

  std::size_t max_size() const { return tests_.size(); }
  const LocalTest& test_for_size(std::size_t m) const;
  const std::shared_ptr<const LocalTest>& shared_test_for_size(std::size_t m) const;

 private:
  std::vector<std::shared_ptr<const LocalTest>> tests_;  // tests_[m-1] handles size m
};

// Fast closed testing. Stage k tests the worst subsets containing rank k
// from largest to smallest; the first non-rejection halts the procedure,
// which then rejects exactly ranks 1..k-1. Equivalent to full closure for
// monotone symmetric level-alpha rules, in O((s+1) n) local-test calls.
RejectionResult fact_reject(const SortedPValues& sorted, const RulePlan& plan, Alpha alpha);

// Adjusted p-value for rank k: the largest local-test p-value over the
// worst subsets of every size m = 1..n containing rank k. Thresholding
// the output at alpha reproduces fact_reject. O(n^2) local-test calls.
AdjustedPValues fact_adjusted(const SortedPValues& sorted, const RulePlan& plan);

// O(n s) shortcut valid when every test in the plan is consonant: stage k
// only tests the single tail subset {p_(k), ..., p_(n)}. The caller is
// responsible for consonance; see the consonance module for verdicts.
RejectionResult consonant_shortcut(const SortedPValues& sorted, const RulePlan& plan, Alpha alpha);

}  // namespace fact

#endif
