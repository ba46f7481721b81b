#ifndef FACT_SIM_HPP
#define FACT_SIM_HPP

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fact/core.hpp"
#include "fact/engine.hpp"

namespace fact::sim {

enum class CovarianceKind { Iid, Spiked, Ar1 };

const char* to_string(CovarianceKind kind);
CovarianceKind covariance_from_string(const std::string& s);

// A named multiple-testing method entered in a scenario; the plan must
// cover the scenario dimension. s_param echoes the fusion sparsity knob
// into reports (0 for non-fusion methods).
struct MethodSpec {
  std::string name;
  std::shared_ptr<const RulePlan> plan;
  std::size_t s_param = 0;
};

// One simulation cell of the normal-means model: X ~ N(mu, Sigma) with
// mu_i = sqrt(2n/s) M on the first s_true coordinates, one-sided p-values
// p_i = 1 - Phi(X_i). s_true = 0 or M = 0 is the global null.
struct ScenarioConfig {
  std::size_t n = 100;
  std::size_t s_true = 0;
  double signal = 0.0;  // M
  CovarianceKind cov = CovarianceKind::Iid;
  double rho = 0.0;
  std::size_t trials = 100;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::vector<MethodSpec> methods;

  void validate() const;
  double effect_size() const;  // per nonzero coordinate
};

struct MethodOutcome {
  std::string method;
  std::size_t s_param = 0;
  double fwer = 0.0, fwer_se = 0.0;
  double true_rej_mean = 0.0, true_rej_se = 0.0;
  double false_rej_mean = 0.0, false_rej_se = 0.0;
};

struct SimulationReport {
  std::size_t n = 0;
  std::size_t s_true = 0;
  double signal = 0.0;
  CovarianceKind cov = CovarianceKind::Iid;
  double rho = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<MethodOutcome> methods;
};

// Lower-triangular Cholesky factor of the scenario covariance; throws
// ValidationError when the matrix is not positive semidefinite.
std::vector<double> covariance_cholesky(const ScenarioConfig& config);

// Draws the p-value vector of one trial; deterministic in (seed, trial).
PValueVector sample_statistics(const ScenarioConfig& config, std::size_t trial_index);

SimulationReport run_scenario(const ScenarioConfig& config);

inline constexpr const char* kCsvHeader =
    "method,n,s_true,s_param,M,cov,rho,trials,fwer,fwer_se,true_rej_mean,true_rej_se,"
    "false_rej_mean,false_rej_se,seed";

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const SimulationReport& report);

// Runs every configuration in the grid, emitting one CSV row per
// (method, cell); an empty grid yields a header-only CSV.
void sweep(std::span<const ScenarioConfig> grid, std::ostream& out);

}  // namespace fact::sim

#endif
