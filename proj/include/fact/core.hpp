#ifndef FACT_CORE_HPP
#define FACT_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fact {

// Raised on malformed user input (out-of-range p-values, duplicate ids,
// empty vectors, unparsable files). The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using HypothesisId = std::string;

// Significance level in the open interval (0,1).
class Alpha {
 public:
  explicit Alpha(double level) : level_(level) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ValidationError("alpha must lie strictly between 0 and 1");
    }
  }
  double value() const { return level_; }

 private:
  double level_;
};

// Caller-facing p-value batch. Values must lie in the closed interval
// [0,1]; ids are opaque labels, unique, one per value.
struct PValueVector {
  std::vector<double> values;
  std::vector<HypothesisId> ids;

  // Assigns 1-based index labels when the caller has none.
  static PValueVector with_default_ids(std::vector<double> values);

  std::size_t size() const { return values.size(); }
  void validate() const;  // throws ValidationError
};

// Ascending view of a PValueVector. Ties keep input order (stable sort),
// so rank_to_id is deterministic. Immutable after construction.
class SortedPValues {
 public:
  static SortedPValues from(const PValueVector& input);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& values() const { return sorted_; }
  // Ranks are 1-based throughout, matching the p_(k) convention.
  double value_at(std::size_t rank) const { return sorted_[rank - 1]; }
  const HypothesisId& id_at(std::size_t rank) const { return rank_to_id_[rank - 1]; }
  const std::vector<HypothesisId>& rank_to_id() const { return rank_to_id_; }

 private:
  std::vector<double> sorted_;
  std::vector<HypothesisId> rank_to_id_;
};

SortedPValues sort_pvalues(const PValueVector& input);

struct RejectionResult {
  std::vector<HypothesisId> rejected_ids;  // the rejected_count smallest sorted p-values
  std::size_t rejected_count = 0;
  std::uint64_t local_test_calls = 0;
  std::size_t stop_stage = 0;  // outer-loop stage at halt; n+1 when everything was rejected
};

struct AdjustedPValues {
  std::vector<double> adjusted;            // aligned with sorted ranks, non-decreasing
  std::vector<HypothesisId> rank_to_id;
};

// Ranks (1-based, ascending) of the hardest-to-reject subset of size m
// containing rank k: {k} plus the m-1 largest ranks excluding k.
std::vector<std::size_t> worst_subset(std::size_t n, std::size_t k, std::size_t m);

// Writes the sorted p-values of worst_subset(n, k, m) into out[0..m).
// out is ascending because the tail ranks all exceed k (or include it).
void gather_worst_subset(const SortedPValues& sorted, std::size_t k, std::size_t m,
                         std::span<double> out);

}  // namespace fact

#endif
