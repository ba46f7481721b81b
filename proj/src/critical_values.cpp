#include "fact/critical_values.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fact/rng.hpp"

namespace fact {

namespace {

std::string format_17(double v) {
  char buf[48];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error(std::string("critical value table: bad ") + what + " field '" +
                             std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error(std::string("critical value table: bad ") + what + " field '" +
                             std::string(s) + "'");
  }
  return v;
}

std::string sanitize_for_filename(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-' || ch == '.' || ch == '_';
    out.push_back(keep ? ch : '_');
  }
  return out;
}

}  // namespace

std::vector<double> null_statistic_sample(const LocalTest& test, std::size_t m,
                                          std::size_t samples, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("null_statistic_sample: size must be >= 1");
  if (samples < 1) throw std::invalid_argument("null_statistic_sample: need samples >= 1");
  std::vector<double> stats(samples);
  std::vector<double> draw(m);
  for (std::size_t idx = 0; idx < samples; ++idx) {
    rng::Xoshiro256 gen(rng::derive_seed(seed, m, idx));
    for (auto& u : draw) u = gen.uniform_open();
    stats[idx] = test.statistic(draw);
  }
  std::sort(stats.begin(), stats.end());
  return stats;
}

CriticalValueTable calibrate(const LocalTest& test, std::size_t n_max, Alpha alpha,
                             std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("calibrate: need at least 1000 samples");
  if (n_max < 1) throw std::invalid_argument("calibrate: n_max must be >= 1");

  CriticalValueTable table;
  table.test_name = test.name();
  table.params = test.params();
  table.alpha = alpha.value();
  table.samples = samples;
  table.seed = seed;
  table.source = "monte-carlo";
  table.critical.reserve(n_max);

  const auto b = static_cast<double>(samples);
  const auto quantile_rank = static_cast<std::size_t>(std::ceil(alpha.value() * b));  // 1-based
  for (std::size_t m = 1; m <= n_max; ++m) {
    const auto stats = null_statistic_sample(test, m, samples, seed);
    double c = stats[quantile_rank - 1];
    // Discrete statistics can put an atom on the quantile index; step below
    // it so the empirical rejection mass stays at most alpha.
    const auto count_le =
        static_cast<std::size_t>(std::upper_bound(stats.begin(), stats.end(), c) - stats.begin());
    if (count_le > quantile_rank) {
      const auto first_at =
          std::lower_bound(stats.begin(), stats.end(), c) - stats.begin();
      c = (first_at == 0) ? -std::numeric_limits<double>::infinity() : stats[first_at - 1];
    }
    table.critical.push_back(c);
  }
  return table;
}

std::string table_to_text(const CriticalValueTable& table) {
  std::string out;
  out += "fact-critical-values v1\n";
  out += "test " + table.test_name + "\n";
  out += "params " + table.params + "\n";
  out += "alpha " + format_17(table.alpha) + "\n";
  out += "samples " + std::to_string(table.samples) + "\n";
  out += "seed " + std::to_string(table.seed) + "\n";
  out += "source " + table.source + "\n";
  out += "rows " + std::to_string(table.critical.size()) + "\n";
  for (std::size_t m = 1; m <= table.critical.size(); ++m) {
    out += std::to_string(m) + " " + format_17(table.critical[m - 1]) + "\n";
  }
  return out;
}

CriticalValueTable table_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw std::runtime_error(std::string("critical value table: missing ") + what);
    }
    return std::string_view(line);
  };
  auto field = [](std::string_view l, std::string_view key, const char* what) {
    if (l.substr(0, key.size()) != key) {
      throw std::runtime_error(std::string("critical value table: expected '") + what + "' line");
    }
    return l.substr(key.size());
  };

  if (next_line("header") != "fact-critical-values v1") {
    throw std::runtime_error("critical value table: unrecognized header");
  }
  CriticalValueTable table;
  table.test_name = field(next_line("test"), "test ", "test");
  table.params = field(next_line("params"), "params ", "params");
  table.alpha = parse_double(field(next_line("alpha"), "alpha ", "alpha"), "alpha");
  table.samples = parse_u64(field(next_line("samples"), "samples ", "samples"), "samples");
  table.seed = parse_u64(field(next_line("seed"), "seed ", "seed"), "seed");
  table.source = field(next_line("source"), "source ", "source");
  const auto rows = parse_u64(field(next_line("rows"), "rows ", "rows"), "rows");
  table.critical.reserve(rows);
  for (std::uint64_t m = 1; m <= rows; ++m) {
    const auto l = next_line("row");
    const auto sep = l.find(' ');
    if (sep == std::string_view::npos || parse_u64(l.substr(0, sep), "row index") != m) {
      throw std::runtime_error("critical value table: malformed row " + std::to_string(m));
    }
    std::string_view value = l.substr(sep + 1);
    if (value == "-inf") {
      table.critical.push_back(-std::numeric_limits<double>::infinity());
    } else {
      table.critical.push_back(parse_double(value, "critical value"));
    }
  }
  return table;
}

std::filesystem::path table_cache_path(const std::filesystem::path& cache_dir,
                                       const CriticalValueTable& table) {
  std::string name = sanitize_for_filename(table.test_name);
  if (!table.params.empty()) name += "__" + sanitize_for_filename(table.params);
  name += "__alpha" + sanitize_for_filename(format_17(table.alpha));
  name += "_B" + std::to_string(table.samples);
  name += "_seed" + std::to_string(table.seed);
  name += "_n" + std::to_string(table.critical.size());
  name += ".cvt";
  return cache_dir / name;
}

void save_table(const CriticalValueTable& table, const std::filesystem::path& cache_dir) {
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  const auto path = table_cache_path(cache_dir, table);
  // Write-then-rename so concurrent calibrations of the same key (which
  // produce identical bytes) never expose a torn file.
  auto tmp = path;
  tmp += ".tmp" + std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open calibration cache file " + tmp.string());
    out << table_to_text(table);
    if (!out.good()) {
      throw std::runtime_error("write failed for calibration cache " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

CriticalValueTable load_or_calibrate(const LocalTest& test, std::size_t n_max, Alpha alpha,
                                     std::size_t samples, std::uint64_t seed,
                                     const std::filesystem::path& cache_dir) {
  CriticalValueTable key;
  key.test_name = test.name();
  key.params = test.params();
  key.alpha = alpha.value();
  key.samples = samples;
  key.seed = seed;
  key.critical.resize(n_max);
  const auto path = table_cache_path(cache_dir, key);

  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    auto table = table_from_text(buf.str());
    if (table.test_name == key.test_name && table.params == key.params &&
        table.alpha == key.alpha && table.samples == key.samples && table.seed == key.seed &&
        table.critical.size() == n_max) {
      return table;
    }
    // Key collision with mismatched contents: fall through and regenerate.
  }
  auto table = calibrate(test, n_max, alpha, samples, seed);
  save_table(table, cache_dir);
  return table;
}

}  // namespace fact
