#include "fact/fusion.hpp"

namespace fact {

void FusionSpec::validate() const {
  if (n < 1) throw std::invalid_argument("fusion spec: n must be >= 1");
  if (sparsity < 1 || sparsity > n) {
    throw std::invalid_argument("fusion spec: sparsity must satisfy 1 <= s <= n (got s=" +
                                std::to_string(sparsity) + ", n=" + std::to_string(n) + ")");
  }
  if (sparsity >= 2 && !large_test) {
    throw std::invalid_argument("fusion spec: sizes above the cutoff need a large-subset test");
  }
}

RulePlan simes_hc_plan(const FusionSpec& spec, Alpha alpha) {
  spec.validate();
  auto small = spec.small_test ? spec.small_test
                               : std::static_pointer_cast<const LocalTest>(
                                     std::make_shared<const SimesTest>());
  const std::size_t cut = spec.cutoff();

  if (cut < spec.n) {
    if (const auto* calibrated = dynamic_cast<const CalibratedTest*>(spec.large_test.get())) {
      const auto* table = calibrated->table();
      if (table == nullptr) {
        throw CalibrationMissing("fusion plan: large-subset test '" + spec.large_test->name() +
                                 "' has no calibration table");
      }
      if (table->max_size() < spec.n) {
        throw CalibrationMissing("fusion plan: calibration covers sizes 1.." +
                                 std::to_string(table->max_size()) + " but sizes up to " +
                                 std::to_string(spec.n) + " are needed");
      }
      if (table->alpha != alpha.value()) {
        throw CalibrationMissing("fusion plan: large-subset test calibrated at a different alpha");
      }
    }
  }

  std::vector<std::shared_ptr<const LocalTest>> tests(spec.n);
  for (std::size_t m = 1; m <= spec.n; ++m) {
    tests[m - 1] = (m <= cut) ? small : spec.large_test;
  }
  return RulePlan(std::move(tests));
}

RulePlan uniform_plan(std::shared_ptr<const LocalTest> test, std::size_t n) {
  if (!test) throw std::invalid_argument("uniform plan: missing test");
  if (n < 1) throw std::invalid_argument("uniform plan: n must be >= 1");
  return RulePlan(std::vector<std::shared_ptr<const LocalTest>>(n, std::move(test)));
}

}  // namespace fact
