#include "fact/shortcuts.hpp"

namespace fact {

namespace {

RejectionResult prefix_result(const SortedPValues& sorted, std::size_t rejected) {
  RejectionResult out;
  out.rejected_count = rejected;
  out.local_test_calls = 0;
  out.stop_stage = rejected + 1;
  out.rejected_ids.assign(sorted.rank_to_id().begin(),
                          sorted.rank_to_id().begin() + static_cast<std::ptrdiff_t>(rejected));
  return out;
}

}  // namespace

RejectionResult holm(const SortedPValues& sorted, Alpha alpha) {
  const std::size_t n = sorted.size();
  const auto& p = sorted.values();
  std::size_t rejected = n;
  for (std::size_t i = 1; i <= n; ++i) {
    if (p[i - 1] > alpha.value() / static_cast<double>(n - i + 1)) {
      rejected = i - 1;
      break;
    }
  }
  return prefix_result(sorted, rejected);
}

RejectionResult hommel(const SortedPValues& sorted, Alpha alpha) {
  const std::size_t n = sorted.size();
  const auto& p = sorted.values();
  std::size_t largest_j = 0;
  bool found = false;
  for (std::size_t j = 1; j <= n; ++j) {
    bool all_exceed = true;
    for (std::size_t k = 1; k <= j; ++k) {
      if (!(p[n - j + k - 1] > static_cast<double>(k) * alpha.value() / static_cast<double>(j))) {
        all_exceed = false;
        break;
      }
    }
    if (all_exceed) {
      found = true;
      largest_j = j;
    }
  }
  if (!found) return prefix_result(sorted, n);

  const double threshold = alpha.value() / static_cast<double>(largest_j);
  std::size_t rejected = 0;
  while (rejected < n && p[rejected] <= threshold) ++rejected;
  return prefix_result(sorted, rejected);
}

}  // namespace fact
