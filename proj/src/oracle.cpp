#include "fact/oracle.hpp"

namespace fact {

namespace {

void require_within_cap(std::size_t n) {
  if (n > kBruteForceCap) {
    throw ValidationError("brute-force closure is capped at n = " +
                          std::to_string(kBruteForceCap) + " (2^n subsets); got n = " +
                          std::to_string(n));
  }
}

}  // namespace

BruteForceDetail brute_force_closure_detailed(const SortedPValues& sorted, const RulePlan& plan,
                                              Alpha alpha) {
  const std::size_t n = sorted.size();
  require_within_cap(n);
  if (plan.max_size() < n) {
    throw std::invalid_argument("rule plan covers sizes 1.." + std::to_string(plan.max_size()) +
                                " but the input has " + std::to_string(n) + " hypotheses");
  }

  const auto& values = sorted.values();
  std::vector<bool> rejected(n, true);
  std::vector<std::uint32_t> first_fail(n, 0);

  std::vector<double> subset(n);
  const auto total = std::uint32_t{1} << n;  // n <= 20 by the cap above
  std::uint64_t calls = 0;
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    std::size_t m = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask & (std::uint32_t{1} << r)) subset[m++] = values[r];
    }
    ++calls;
    const bool rej = plan.test_for_size(m).reject(std::span<const double>(subset.data(), m), alpha);
    if (!rej) {
      for (std::size_t r = 0; r < n; ++r) {
        if ((mask & (std::uint32_t{1} << r)) && rejected[r]) {
          rejected[r] = false;
          first_fail[r] = mask;
        }
      }
    }
  }

  BruteForceDetail out;
  out.first_failing_subset = std::move(first_fail);
  out.result.local_test_calls = calls;
  for (std::size_t r = 0; r < n; ++r) {
    if (rejected[r]) {
      out.result.rejected_ids.push_back(sorted.id_at(r + 1));
      ++out.result.rejected_count;
    }
  }
  out.result.stop_stage = out.result.rejected_count + 1;
  return out;
}

RejectionResult brute_force_closure(const SortedPValues& sorted, const RulePlan& plan,
                                    Alpha alpha) {
  return brute_force_closure_detailed(sorted, plan, alpha).result;
}

bool fwer_witness(const SortedPValues& sorted, const RulePlan& plan, Alpha alpha,
                  const std::vector<std::size_t>& true_null_ranks) {
  const std::size_t n = sorted.size();
  require_within_cap(n);
  const auto detail = brute_force_closure_detailed(sorted, plan, alpha);
  for (std::size_t rank : true_null_ranks) {
    if (rank < 1 || rank > n) throw std::invalid_argument("fwer_witness: rank out of range");
    if (detail.first_failing_subset[rank - 1] == 0) return true;  // rank was rejected
  }
  return false;
}

}  // namespace fact
