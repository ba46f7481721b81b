#include "fact/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace fact {

RulePlan::RulePlan(std::vector<std::shared_ptr<const LocalTest>> tests_by_size)
    : tests_(std::move(tests_by_size)) {
  if (tests_.empty()) throw std::invalid_argument("rule plan must cover at least size 1");
  for (std::size_t m = 1; m <= tests_.size(); ++m) {
    if (!tests_[m - 1]) {
      throw std::invalid_argument("rule plan has no test for subset size " + std::to_string(m));
    }
  }
}

const LocalTest& RulePlan::test_for_size(std::size_t m) const {
  return *shared_test_for_size(m);
}

const std::shared_ptr<const LocalTest>& RulePlan::shared_test_for_size(std::size_t m) const {
  if (m < 1 || m > tests_.size()) {
    throw std::out_of_range("rule plan covers sizes 1.." + std::to_string(tests_.size()) +
                            ", requested " + std::to_string(m));
  }
  return tests_[m - 1];
}

namespace {

void require_plan_covers(const RulePlan& plan, std::size_t n) {
  if (plan.max_size() < n) {
    throw std::invalid_argument("rule plan covers sizes 1.." + std::to_string(plan.max_size()) +
                                " but the input has " + std::to_string(n) + " hypotheses");
  }
}

RejectionResult make_result(const SortedPValues& sorted, std::size_t rejected,
                            std::uint64_t calls, std::size_t stop_stage) {
  RejectionResult out;
  out.rejected_count = rejected;
  out.local_test_calls = calls;
  out.stop_stage = stop_stage;
  out.rejected_ids.assign(sorted.rank_to_id().begin(),
                          sorted.rank_to_id().begin() + static_cast<std::ptrdiff_t>(rejected));
  return out;
}

}  // namespace

RejectionResult fact_reject(const SortedPValues& sorted, const RulePlan& plan, Alpha alpha) {
  const std::size_t n = sorted.size();
  require_plan_covers(plan, n);
  const auto& values = sorted.values();

  std::uint64_t calls = 0;
  std::vector<double> subset(n);
  for (std::size_t k = 1; k <= n; ++k) {
    // Inner loop j = k..n tests {p_(k), p_(j+1), ..., p_(n)} of size n-j+1,
    // the worst subsets containing rank k from largest (not yet covered by
    // earlier stages) down to {p_(k)} alone.
    for (std::size_t j = k; j <= n; ++j) {
      const std::size_t m = n - j + 1;
      subset[0] = values[k - 1];
      std::copy(values.begin() + static_cast<std::ptrdiff_t>(j), values.end(),
                subset.begin() + 1);
      ++calls;
      bool rejected;
      try {
        rejected = plan.test_for_size(m).reject(std::span<const double>(subset.data(), m), alpha);
      } catch (const std::exception& e) {
        throw std::runtime_error("local test '" + plan.test_for_size(m).name() + "' failed at stage " +
                                 std::to_string(k) + ", subset size " + std::to_string(m) + ": " +
                                 e.what());
      }
      if (!rejected) {
        return make_result(sorted, k - 1, calls, k);
      }
    }
  }
  return make_result(sorted, n, calls, n + 1);
}

AdjustedPValues fact_adjusted(const SortedPValues& sorted, const RulePlan& plan) {
  const std::size_t n = sorted.size();
  require_plan_covers(plan, n);
  for (std::size_t m = 1; m <= n; ++m) {
    if (!plan.test_for_size(m).has_pvalue()) {
      throw PValueUnavailable("adjusted p-values need a p-value from '" +
                              plan.test_for_size(m).name() + "' (size " + std::to_string(m) + ")");
    }
  }

  AdjustedPValues out;
  out.rank_to_id = sorted.rank_to_id();
  out.adjusted.resize(n);
  std::vector<double> subset(n);
  for (std::size_t k = 1; k <= n; ++k) {
    double worst = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
      gather_worst_subset(sorted, k, m, subset);
      worst = std::max(
          worst, plan.test_for_size(m).pvalue(std::span<const double>(subset.data(), m)));
    }
    out.adjusted[k - 1] = std::min(worst, 1.0);
  }
  return out;
}

RejectionResult consonant_shortcut(const SortedPValues& sorted, const RulePlan& plan,
                                   Alpha alpha) {
  const std::size_t n = sorted.size();
  require_plan_covers(plan, n);
  const auto& values = sorted.values();

  std::uint64_t calls = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t m = n - k + 1;
    const std::span<const double> tail(values.data() + (k - 1), m);
    ++calls;
    if (!plan.test_for_size(m).reject(tail, alpha)) {
      return make_result(sorted, k - 1, calls, k);
    }
  }
  return make_result(sorted, n, calls, n + 1);
}

}  // namespace fact
