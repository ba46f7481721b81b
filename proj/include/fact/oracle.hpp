#ifndef FACT_ORACLE_HPP
#define FACT_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "fact/core.hpp"
#include "fact/engine.hpp"

namespace fact {

// Hard cap for exhaustive closure; 2^20 subsets is the intended ceiling.
inline constexpr std::size_t kBruteForceCap = 20;

struct BruteForceDetail {
  RejectionResult result;
  // Per rank (1-based index r at [r-1]): the first enumerated subset mask
  // containing r that the local test did not reject; 0 when r is rejected.
  // Bit b set means rank b+1 is in the subset.
  std::vector<std::uint32_t> first_failing_subset;
};

// Closed testing by exhaustive enumeration of all 2^n - 1 nonempty
// subsets, in binary-counter order, no shortcuts. Ground truth for the
// FACT equivalence checks. Throws ValidationError when n exceeds the cap.
RejectionResult brute_force_closure(const SortedPValues& sorted, const RulePlan& plan,
                                    Alpha alpha);
BruteForceDetail brute_force_closure_detailed(const SortedPValues& sorted, const RulePlan& plan,
                                              Alpha alpha);

// True iff the exhaustive closure rejects at least one of the given
// true-null ranks (1-based). Ground-truth FWER indicator for one draw.
bool fwer_witness(const SortedPValues& sorted, const RulePlan& plan, Alpha alpha,
                  const std::vector<std::size_t>& true_null_ranks);

}  // namespace fact

#endif
