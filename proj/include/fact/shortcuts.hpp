#ifndef FACT_SHORTCUTS_HPP
#define FACT_SHORTCUTS_HPP

#include "fact/core.hpp"

namespace fact {

// Holm's step-down procedure: reject rank k iff p_(i) <= alpha/(n-i+1)
// for every i <= k. Reference oracle for the all-Bonferroni plan.
RejectionResult holm(const SortedPValues& sorted, Alpha alpha);

// Hommel's procedure, the literal quadratic scan: find the largest j with
// p_(n-j+k) > k alpha / j for all k = 1..j; reject everything if no such
// j exists, otherwise reject all p_i <= alpha/j. Reference oracle for the
// all-Simes plan.
RejectionResult hommel(const SortedPValues& sorted, Alpha alpha);

}  // namespace fact

#endif
