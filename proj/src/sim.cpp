#include "fact/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "fact/rng.hpp"
#include "fact/special_fns.hpp"

namespace fact::sim {

namespace {

std::string fmt(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Standard normal pairs by Box-Muller on our own uniform stream, so draws
// are identical across standard libraries.
void fill_standard_normal(rng::Xoshiro256& gen, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const double u1 = gen.uniform_open();
    const double u2 = gen.uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < out.size()) out[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
}

}  // namespace

const char* to_string(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::Iid: return "iid";
    case CovarianceKind::Spiked: return "spiked";
    case CovarianceKind::Ar1: return "ar1";
  }
  return "?";
}

CovarianceKind covariance_from_string(const std::string& s) {
  if (s == "iid") return CovarianceKind::Iid;
  if (s == "spiked") return CovarianceKind::Spiked;
  if (s == "ar1") return CovarianceKind::Ar1;
  throw ValidationError("unknown covariance kind '" + s + "' (want iid, spiked, or ar1)");
}

void ScenarioConfig::validate() const {
  if (n < 1) throw ValidationError("scenario: n must be >= 1");
  if (s_true > n) throw ValidationError("scenario: s_true cannot exceed n");
  if (trials < 1) throw ValidationError("scenario: trials must be >= 1");
  Alpha check(alpha);
  switch (cov) {
    case CovarianceKind::Iid:
      if (rho != 0.0) throw ValidationError("scenario: iid covariance requires rho = 0");
      break;
    case CovarianceKind::Spiked: {
      const double lo = (n > 1) ? -1.0 / static_cast<double>(n - 1) : 0.0;
      if (!(rho >= lo && rho <= 1.0)) {
        throw ValidationError("scenario: spiked rho must lie in [-1/(n-1), 1]");
      }
      break;
    }
    case CovarianceKind::Ar1:
      if (!(rho > -1.0 && rho < 1.0)) {
        throw ValidationError("scenario: AR-1 rho must lie in (-1, 1)");
      }
      break;
  }
  for (const auto& method : methods) {
    if (!method.plan || method.plan->max_size() < n) {
      throw ValidationError("scenario: method '" + method.name +
                            "' has no plan covering dimension n");
    }
  }
}

double ScenarioConfig::effect_size() const {
  if (s_true == 0 || signal == 0.0) return 0.0;
  return std::sqrt(2.0 * static_cast<double>(n) / static_cast<double>(s_true)) * signal;
}

std::vector<double> covariance_cholesky(const ScenarioConfig& config) {
  const std::size_t n = config.n;
  std::vector<double> sigma(n * n, 0.0);
  switch (config.cov) {
    case CovarianceKind::Iid:
      for (std::size_t i = 0; i < n; ++i) sigma[i * n + i] = 1.0;
      break;
    case CovarianceKind::Spiked:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sigma[i * n + j] = (i == j) ? 1.0 : config.rho;
      }
      break;
    case CovarianceKind::Ar1:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          sigma[i * n + j] = std::pow(config.rho, std::abs(static_cast<double>(i) -
                                                           static_cast<double>(j)));
        }
      }
      break;
  }

  // In-place lower Cholesky with a PSD tolerance for boundary rho values.
  std::vector<double> chol(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = sigma[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= chol[j * n + k] * chol[j * n + k];
    if (diag < -1e-10) {
      throw ValidationError("covariance matrix is not positive semidefinite (pivot " +
                            fmt(diag) + " at column " + std::to_string(j + 1) + ")");
    }
    const double ljj = std::sqrt(std::max(0.0, diag));
    chol[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double off = sigma[i * n + j];
      for (std::size_t k = 0; k < j; ++k) off -= chol[i * n + k] * chol[j * n + k];
      chol[i * n + j] = (ljj > 0.0) ? off / ljj : 0.0;
    }
  }
  return chol;
}

namespace {

PValueVector sample_with_factor(const ScenarioConfig& config, std::size_t trial_index,
                                const std::vector<double>& chol) {
  const std::size_t n = config.n;
  rng::Xoshiro256 gen(rng::derive_seed(config.seed, 0x7121AL, trial_index));
  std::vector<double> z(n);
  fill_standard_normal(gen, z);

  const double mu = config.effect_size();
  std::vector<double> pvals(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0;
    if (config.cov == CovarianceKind::Iid) {
      x = z[i];
    } else {
      for (std::size_t k = 0; k <= i; ++k) x += chol[i * n + k] * z[k];
    }
    if (i < config.s_true) x += mu;
    pvals[i] = special::normal_cdf(-x);  // one-sided upper-tail p-value
  }
  return PValueVector::with_default_ids(std::move(pvals));
}

}  // namespace

PValueVector sample_statistics(const ScenarioConfig& config, std::size_t trial_index) {
  config.validate();
  const auto chol = (config.cov == CovarianceKind::Iid) ? std::vector<double>{}
                                                        : covariance_cholesky(config);
  return sample_with_factor(config, trial_index, chol);
}

SimulationReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  if (config.methods.empty()) throw ValidationError("scenario: no methods to run");

  const auto chol = (config.cov == CovarianceKind::Iid) ? std::vector<double>{}
                                                        : covariance_cholesky(config);
  const Alpha alpha(config.alpha);
  // Under M = 0 every coordinate has a zero effect, so all are true nulls.
  const std::size_t true_alternatives = (config.signal == 0.0) ? 0 : config.s_true;
  const std::size_t k = config.methods.size();
  std::vector<std::size_t> fwer_hits(k, 0);
  std::vector<double> true_sum(k, 0.0), true_sumsq(k, 0.0);
  std::vector<double> false_sum(k, 0.0), false_sumsq(k, 0.0);

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const auto pvec = sample_with_factor(config, trial, chol);
    const auto sorted = sort_pvalues(pvec);
    for (std::size_t mi = 0; mi < k; ++mi) {
      RejectionResult res;
      try {
        res = fact_reject(sorted, *config.methods[mi].plan, alpha);
      } catch (const std::exception& e) {
        throw std::runtime_error("trial " + std::to_string(trial) + ", method '" +
                                 config.methods[mi].name + "': " + e.what());
      }
      std::size_t true_rej = 0;
      for (const auto& id : res.rejected_ids) {
        // Default ids are 1-based indices; the first coordinates carry the signal.
        const auto idx = static_cast<std::size_t>(std::stoull(id));
        if (idx <= true_alternatives) ++true_rej;
      }
      const std::size_t false_rej = res.rejected_count - true_rej;
      if (false_rej > 0) ++fwer_hits[mi];
      true_sum[mi] += static_cast<double>(true_rej);
      true_sumsq[mi] += static_cast<double>(true_rej) * static_cast<double>(true_rej);
      false_sum[mi] += static_cast<double>(false_rej);
      false_sumsq[mi] += static_cast<double>(false_rej) * static_cast<double>(false_rej);
    }
  }

  SimulationReport report;
  report.n = config.n;
  report.s_true = config.s_true;
  report.signal = config.signal;
  report.cov = config.cov;
  report.rho = config.rho;
  report.trials = config.trials;
  report.seed = config.seed;

  const double t = static_cast<double>(config.trials);
  for (std::size_t mi = 0; mi < k; ++mi) {
    MethodOutcome out;
    out.method = config.methods[mi].name;
    out.s_param = config.methods[mi].s_param;
    out.fwer = static_cast<double>(fwer_hits[mi]) / t;
    out.fwer_se = std::sqrt(out.fwer * (1.0 - out.fwer) / t);
    auto mean_se = [t](double sum, double sumsq, double& mean, double& se) {
      mean = sum / t;
      const double var = (t > 1.0) ? std::max(0.0, (sumsq - t * mean * mean) / (t - 1.0)) : 0.0;
      se = std::sqrt(var / t);
    };
    mean_se(true_sum[mi], true_sumsq[mi], out.true_rej_mean, out.true_rej_se);
    mean_se(false_sum[mi], false_sumsq[mi], out.false_rej_mean, out.false_rej_se);
    report.methods.push_back(std::move(out));
  }
  return report;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << "\n"; }

void write_csv_rows(std::ostream& out, const SimulationReport& report) {
  for (const auto& m : report.methods) {
    out << m.method << ',' << report.n << ',' << report.s_true << ',' << m.s_param << ','
        << fmt(report.signal) << ',' << to_string(report.cov) << ',' << fmt(report.rho) << ','
        << report.trials << ',' << fmt(m.fwer) << ',' << fmt(m.fwer_se) << ','
        << fmt(m.true_rej_mean) << ',' << fmt(m.true_rej_se) << ',' << fmt(m.false_rej_mean)
        << ',' << fmt(m.false_rej_se) << ',' << report.seed << "\n";
  }
}

void sweep(std::span<const ScenarioConfig> grid, std::ostream& out) {
  write_csv_header(out);
  for (const auto& config : grid) {
    write_csv_rows(out, run_scenario(config));
  }
}

}  // namespace fact::sim
