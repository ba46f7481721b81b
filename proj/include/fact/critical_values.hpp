#ifndef FACT_CRITICAL_VALUES_HPP
#define FACT_CRITICAL_VALUES_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fact/core.hpp"
#include "fact/local_tests.hpp"

namespace fact {

// Sorted null sample of the test statistic for subset size m: B draws of
// iid Uniform(0,1)^m, each from the stream derived from (seed, m, index).
// Independent of evaluation order, so parallel runs agree bit-exactly.
std::vector<double> null_statistic_sample(const LocalTest& test, std::size_t m,
                                          std::size_t samples, std::uint64_t seed);

// Monte-Carlo calibration of c_m for m = 1..n_max: the empirical
// alpha-quantile (inverse ECDF) of the null statistic sample. When an
// atom of the discrete part sits on the quantile index, the value steps
// down below the atom so the empirical rejection mass stays <= alpha.
CriticalValueTable calibrate(const LocalTest& test, std::size_t n_max, Alpha alpha,
                             std::size_t samples, std::uint64_t seed);

// Plain-text serialization: versioned header then "m c_m" rows, decimal
// point formatting, 17 significant digits (round-trips doubles exactly).
std::string table_to_text(const CriticalValueTable& table);
CriticalValueTable table_from_text(const std::string& text);

std::filesystem::path table_cache_path(const std::filesystem::path& cache_dir,
                                       const CriticalValueTable& table);

void save_table(const CriticalValueTable& table, const std::filesystem::path& cache_dir);

// Returns the cached table when an exact-key file exists, otherwise
// calibrates, writes the cache file, and returns the fresh table.
CriticalValueTable load_or_calibrate(const LocalTest& test, std::size_t n_max, Alpha alpha,
                                     std::size_t samples, std::uint64_t seed,
                                     const std::filesystem::path& cache_dir);

}  // namespace fact

#endif
