#include "fact/consonance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "fact/rng.hpp"
#include "fact/special_fns.hpp"

namespace fact {

namespace {

std::string fmt(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

const char* to_string(ConsonanceVerdict v) {
  switch (v) {
    case ConsonanceVerdict::Consonant: return "consonant";
    case ConsonanceVerdict::NotConsonant: return "not consonant";
    case ConsonanceVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string ConsonanceReport::to_text() const {
  std::string out = "statistic,alpha,verdict\n";
  out += statistic_name + "," + fmt(alpha) + "," + to_string(verdict) + "\n";
  out += "size,critical,level,level_se,growth_ok\n";
  for (const auto& l : levels) {
    const bool growth_ok =
        std::find(growth_violations.begin(), growth_violations.end(), l.size) ==
        growth_violations.end();
    out += std::to_string(l.size) + "," + fmt(l.critical) + "," + fmt(l.estimate) + "," +
           fmt(l.std_error) + "," + (growth_ok ? "1" : "0") + "\n";
  }
  for (const auto& f : findings) out += "# " + f + "\n";
  return out;
}

ConsonanceReport ccm_check(const MonotoneSumFn& f, std::span<const double> critical_values,
                           Alpha alpha, std::size_t samples, std::uint64_t seed) {
  if (!f.f) throw std::invalid_argument("ccm_check: missing function");
  if (critical_values.empty()) throw std::invalid_argument("ccm_check: no critical values");
  if (samples < 10000) throw std::invalid_argument("ccm_check: need at least 10^4 samples");

  ConsonanceReport report;
  report.statistic_name = f.name;
  report.alpha = alpha.value();

  const double c1 = critical_values[0];
  bool any_level_violation = false;
  bool all_levels_conclusive = true;

  for (std::size_t k = 1; k <= critical_values.size(); ++k) {
    const double ck = critical_values[k - 1];

    // Growth condition, exact arithmetic, no tolerance.
    if (ck > static_cast<double>(k) * c1) {
      report.growth_violations.push_back(k);
      report.findings.push_back("growth violated at k=" + std::to_string(k) + ": c_k=" + fmt(ck) +
                                " > k*c_1=" + fmt(static_cast<double>(k) * c1));
    }

    // Level F_k(c_k) by Monte Carlo on the sum scale.
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      rng::Xoshiro256 gen(rng::derive_seed(seed, k, i));
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += f.f(gen.uniform_open());
      if (sum <= ck) ++hits;
    }
    const double b = static_cast<double>(samples);
    const double est = static_cast<double>(hits) / b;
    const double se = std::sqrt(est * (1.0 - est) / b);
    report.levels.push_back({k, ck, est, se});

    const double margin = std::abs(est - alpha.value());
    if (margin < 5.0 * std::max(se, 1e-300)) {
      all_levels_conclusive = false;
    } else if (est > alpha.value()) {
      any_level_violation = true;
      report.findings.push_back("level violated at k=" + std::to_string(k) + ": F_k(c_k)=" +
                                fmt(est) + " (se " + fmt(se) + ") > alpha=" +
                                fmt(alpha.value()));
    }
  }

  if (!report.growth_violations.empty() || any_level_violation) {
    report.verdict = ConsonanceVerdict::NotConsonant;
  } else if (all_levels_conclusive) {
    report.verdict = ConsonanceVerdict::Consonant;
  } else {
    report.verdict = ConsonanceVerdict::Inconclusive;
    report.findings.push_back("level estimates within 5 standard errors of alpha; not decisive");
  }
  return report;
}

ConsonanceReport ccm_check(const LocalTest& test, std::span<const double> critical_values,
                           Alpha alpha, std::size_t samples, std::uint64_t seed) {
  const MonotoneSumFn* f = test.as_monotone_sum();
  if (f == nullptr) {
    throw NotMonotoneSum("'" + test.name() +
                         "' is not a monotone combination; the CCM conditions cover only "
                         "sum-form statistics");
  }
  auto report = ccm_check(*f, critical_values, alpha, samples, seed);
  report.statistic_name = test.name();
  return report;
}

MeanConditionResult mean_condition(const MonotoneSumFn& f, Alpha alpha, std::size_t samples,
                                   std::uint64_t seed) {
  if (!f.f) throw std::invalid_argument("mean_condition: missing function");
  if (samples < 2) throw std::invalid_argument("mean_condition: need samples >= 2");

  double sum = 0.0, sumsq = 0.0;
  rng::Xoshiro256 gen(rng::derive_seed(seed, 0x4D4EAFULL));
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f.f(gen.uniform_open());
    sum += v;
    sumsq += v * v;
  }
  const double b = static_cast<double>(samples);
  const double mean = sum / b;
  const double var = std::max(0.0, (sumsq - b * mean * mean) / (b - 1.0));

  MeanConditionResult out;
  out.fn_name = f.name;
  out.mean_estimate = mean;
  out.std_error = std::sqrt(var / b);
  out.f_alpha = f.f(alpha.value());
  out.holds = mean <= out.f_alpha;
  out.conclusive = std::abs(mean - out.f_alpha) > 5.0 * std::max(out.std_error, 1e-300);
  return out;
}

ConsonanceReport stouffer_consonance(Alpha alpha, std::size_t n_max) {
  if (n_max < 2) throw std::invalid_argument("stouffer_consonance: need n_max >= 2");
  std::vector<double> critical(n_max);
  const double q = special::normal_quantile(alpha.value());
  for (std::size_t k = 1; k <= n_max; ++k) {
    critical[k - 1] = std::sqrt(static_cast<double>(k)) * q;
  }
  StoufferTest stouffer;
  auto report = ccm_check(stouffer, critical, alpha, 10000, 0x57075ULL);
  report.statistic_name = "stouffer";
  return report;
}

TruncatedProductConsonance truncated_product_consonance(double tau, Alpha alpha) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("truncated_product_consonance: tau must lie in (0,1)");
  }
  TruncatedProductConsonance out;
  out.tau = tau;
  out.alpha = alpha.value();
  out.lower_bound = 1.0 - std::sqrt(1.0 - alpha.value());
  out.consonant = out.lower_bound <= tau && tau <= alpha.value();
  out.detail = "window " + fmt(out.lower_bound) + " <= tau <= " + fmt(out.alpha) + ", tau=" +
               fmt(tau) + (out.consonant ? ": consonant" : ": outside the window");
  return out;
}

}  // namespace fact
