#include "fact/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace fact {

PValueVector PValueVector::with_default_ids(std::vector<double> values) {
  PValueVector out;
  out.ids.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.ids.push_back(std::to_string(i + 1));
  out.values = std::move(values);
  return out;
}

void PValueVector::validate() const {
  if (values.empty()) throw ValidationError("p-value vector must contain at least one entry");
  if (values.size() != ids.size()) {
    throw ValidationError("p-value and id lists have different lengths");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= 0.0 && v <= 1.0) || std::isnan(v)) {
      throw ValidationError("p-value out of [0,1] for id '" + ids[i] + "'");
    }
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ValidationError("duplicate hypothesis id '" + id + "'");
  }
}

SortedPValues SortedPValues::from(const PValueVector& input) {
  input.validate();
  const std::size_t n = input.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return input.values[a] < input.values[b]; });
  SortedPValues out;
  out.sorted_.reserve(n);
  out.rank_to_id_.reserve(n);
  for (std::size_t idx : order) {
    out.sorted_.push_back(input.values[idx]);
    out.rank_to_id_.push_back(input.ids[idx]);
  }
  return out;
}

SortedPValues sort_pvalues(const PValueVector& input) { return SortedPValues::from(input); }

std::vector<std::size_t> worst_subset(std::size_t n, std::size_t k, std::size_t m) {
  if (k < 1 || k > n) throw std::invalid_argument("worst_subset: rank k out of range");
  if (m < 1 || m > n) throw std::invalid_argument("worst_subset: size m out of range");
  std::vector<std::size_t> ranks;
  ranks.reserve(m);
  if (m <= n - k + 1) {
    // k plus the m-1 largest ranks, all above k.
    ranks.push_back(k);
    for (std::size_t r = n - m + 2; r <= n; ++r) ranks.push_back(r);
  } else {
    // The top-m block {n-m+1, ..., n}; it already contains k.
    for (std::size_t r = n - m + 1; r <= n; ++r) ranks.push_back(r);
  }
  return ranks;
}

void gather_worst_subset(const SortedPValues& sorted, std::size_t k, std::size_t m,
                         std::span<double> out) {
  const std::size_t n = sorted.size();
  if (out.size() < m) throw std::invalid_argument("gather_worst_subset: output span too small");
  const auto& v = sorted.values();
  if (m <= n - k + 1) {
    out[0] = v[k - 1];
    for (std::size_t i = 1; i < m; ++i) out[i] = v[n - m + i];
  } else {
    for (std::size_t i = 0; i < m; ++i) out[i] = v[n - m + i];
  }
}

}  // namespace fact
