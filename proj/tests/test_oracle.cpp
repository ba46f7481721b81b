#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "fact/engine.hpp"
#include "fact/fusion.hpp"
#include "fact/oracle.hpp"
#include "fact/shortcuts.hpp"

using namespace fact;

namespace {

const Alpha kAlpha05(0.05);

SortedPValues sorted_from(std::vector<double> values) {
  return sort_pvalues(PValueVector::with_default_ids(std::move(values)));
}

// Anti-monotone fixture: multi-element subsets reject only when the
// largest companion p-value is big, which violates the monotonicity
// precondition of the FACT equivalence and makes FACT over-reject
// relative to the exhaustive closure.
class NeedsLargeCompanionTest final : public LocalTest {
 public:
  NeedsLargeCompanionTest() : LocalTest("broken-needs-large-companion") {}
  double statistic(std::span<const double> pvals) const override {
    return *std::min_element(pvals.begin(), pvals.end());
  }
  bool reject(std::span<const double> pvals, Alpha alpha) const override {
    const auto [lo, hi] = std::minmax_element(pvals.begin(), pvals.end());
    return *lo <= alpha.value() && (pvals.size() == 1 || *hi >= 0.5);
  }
  bool has_pvalue() const override { return false; }
  double pvalue(std::span<const double>) const override {
    throw PValueUnavailable("none");
  }
};

}  // namespace

TEST_CASE("single hypothesis closure") {
  const auto plan = uniform_plan(std::make_shared<const BonferroniTest>(), 1);
  CHECK(brute_force_closure(sorted_from({0.04}), plan, kAlpha05).rejected_count == 1);
  CHECK(brute_force_closure(sorted_from({0.06}), plan, kAlpha05).rejected_count == 0);
}

TEST_CASE("three-hypothesis closure equals holm for bonferroni") {
  const auto plan = uniform_plan(std::make_shared<const BonferroniTest>(), 3);
  const auto sorted = sorted_from({0.01, 0.02, 0.2});
  const auto closure = brute_force_closure(sorted, plan, kAlpha05);
  CHECK(closure.rejected_count == 2);
  CHECK(closure.local_test_calls == 7);  // all 2^3 - 1 subsets, no shortcuts
  CHECK(closure.rejected_ids == holm(sorted, kAlpha05).rejected_ids);
}

TEST_CASE("fact equals the exhaustive closure on random instances") {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::shared_ptr<const LocalTest>> tests{
      std::make_shared<const BonferroniTest>(), std::make_shared<const SimesTest>(),
      std::make_shared<const FisherTest>(),
      std::make_shared<const WilkinsonTest>(0.05)};
  for (int rep = 0; rep < 400; ++rep) {
    const std::size_t n = 1 + gen() % 9;
    std::vector<double> p(n);
    for (auto& v : p) v = (u(gen) < 0.5) ? u(gen) * 0.06 : u(gen);
    const auto sorted = sorted_from(p);
    for (const auto& test : tests) {
      const auto plan = uniform_plan(test, n);
      const auto fast = fact_reject(sorted, plan, kAlpha05);
      const auto slow = brute_force_closure(sorted, plan, kAlpha05);
      INFO(test->name(), " n=", n);
      CHECK(fast.rejected_count == slow.rejected_count);
      auto a = fast.rejected_ids;
      auto b = slow.rejected_ids;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
}

TEST_CASE("the comparison catches a rule that breaks the monotonicity precondition") {
  const auto broken = std::make_shared<const NeedsLargeCompanionTest>();
  // FACT's stage-1 subsets all carry the large tail values and the lone
  // singleton, so every stage passes; the closure also checks {p_1, p_2},
  // whose companion 0.4 is too small, and correctly refuses rank 1.
  const auto sorted = sorted_from({0.03, 0.4, 0.9});
  const auto plan = uniform_plan(broken, 3);
  const auto fast = fact_reject(sorted, plan, kAlpha05);
  const auto slow = brute_force_closure_detailed(sorted, plan, kAlpha05);
  CHECK(fast.rejected_count == 1);
  CHECK(slow.result.rejected_count == 0);
  // the detail names the concrete non-rejected subset for the report
  CHECK(slow.first_failing_subset[0] == 0b011);  // {rank 1, rank 2}
}

TEST_CASE("closure is permutation-equivariant for symmetric plans") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto simes = std::make_shared<const SimesTest>();
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen() % 7;
    PValueVector original;
    for (std::size_t i = 0; i < n; ++i) {
      original.values.push_back((u(gen) < 0.5) ? u(gen) * 0.08 : u(gen));
      original.ids.push_back("h" + std::to_string(i + 1));
    }
    PValueVector shuffled = original;
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = gen() % (i + 1);
      std::swap(shuffled.values[i], shuffled.values[j]);
      std::swap(shuffled.ids[i], shuffled.ids[j]);
    }
    const auto plan = uniform_plan(simes, n);
    auto a = brute_force_closure(sort_pvalues(original), plan, kAlpha05).rejected_ids;
    auto b = brute_force_closure(sort_pvalues(shuffled), plan, kAlpha05).rejected_ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("size cap is a hard refusal") {
  std::vector<double> p(21, 0.5);
  const auto plan = uniform_plan(std::make_shared<const SimesTest>(), 21);
  CHECK_THROWS_AS(brute_force_closure(sorted_from(p), plan, kAlpha05), ValidationError);
}

TEST_CASE("fwer witness") {
  const auto plan = uniform_plan(std::make_shared<const BonferroniTest>(), 4);
  const auto ones = sorted_from({1.0, 1.0, 1.0, 1.0});
  CHECK_FALSE(fwer_witness(ones, plan, kAlpha05, {1, 2, 3, 4}));  // nothing rejected
  const auto strong = sorted_from({1e-6, 1e-6, 0.5, 0.9});
  CHECK_FALSE(fwer_witness(strong, plan, kAlpha05, {}));  // no true nulls to hit
  CHECK(fwer_witness(strong, plan, kAlpha05, {1}));
  CHECK_FALSE(fwer_witness(strong, plan, kAlpha05, {3, 4}));

  // under iid uniform nulls the witness frequency stays near alpha
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t hits = 0;
  const std::size_t trials = 1000;
  std::vector<std::size_t> all_ranks{1, 2, 3, 4, 5, 6, 7, 8};
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> p(8);
    for (auto& v : p) v = u(gen);
    if (fwer_witness(sorted_from(p), uniform_plan(std::make_shared<const SimesTest>(), 8),
                     kAlpha05, all_ranks)) {
      ++hits;
    }
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(trials);
  CHECK(rate <= 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / static_cast<double>(trials)));
}
