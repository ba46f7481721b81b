#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fact/engine.hpp"
#include "fact/fusion.hpp"
#include "fact/sim.hpp"

using namespace fact;
using namespace fact::sim;

namespace {

MethodSpec simes_method(std::size_t n) {
  MethodSpec spec;
  spec.name = "simes";
  spec.plan = std::make_shared<const RulePlan>(
      uniform_plan(std::make_shared<const SimesTest>(), n));
  return spec;
}

ScenarioConfig base_config(std::size_t n) {
  ScenarioConfig config;
  config.n = n;
  config.s_true = 0;
  config.signal = 0.0;
  config.trials = 50;
  config.seed = 99;
  config.methods = {simes_method(n)};
  return config;
}

}  // namespace

TEST_CASE("null p-values are uniform (probability integral transform)") {
  auto config = base_config(20);
  config.trials = 1;
  std::vector<double> pooled;
  for (std::size_t trial = 0; trial < 5000; ++trial) {
    const auto pvec = sample_statistics(config, trial);
    pooled.insert(pooled.end(), pvec.values.begin(), pvec.values.end());
  }
  std::sort(pooled.begin(), pooled.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const double hi = static_cast<double>(i + 1) / static_cast<double>(pooled.size());
    const double lo = static_cast<double>(i) / static_cast<double>(pooled.size());
    ks = std::max({ks, std::abs(hi - pooled[i]), std::abs(pooled[i] - lo)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("spiked covariance at rho = 0 reproduces the iid stream") {
  auto iid = base_config(10);
  auto spiked = iid;
  spiked.cov = CovarianceKind::Spiked;
  spiked.rho = 0.0;
  for (std::size_t trial : {std::size_t{0}, std::size_t{3}}) {
    const auto a = sample_statistics(iid, trial);
    const auto b = sample_statistics(spiked, trial);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("strong signals push non-null p-values toward zero") {
  auto config = base_config(12);
  config.s_true = 4;
  config.signal = 40.0;  // per-coordinate effect sqrt(2n/s) M is enormous
  const auto pvec = sample_statistics(config, 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(pvec.values[i] < 1e-12);
}

TEST_CASE("effect size formula matches sqrt(2n/s) M") {
  auto config = base_config(50);
  config.s_true = 8;
  config.signal = 1.5;
  CHECK(config.effect_size() == doctest::Approx(std::sqrt(2.0 * 50 / 8.0) * 1.5).epsilon(1e-12));
  config.signal = 0.0;
  CHECK(config.effect_size() == 0.0);
}

TEST_CASE("covariance validation") {
  auto config = base_config(10);
  config.cov = CovarianceKind::Spiked;
  config.rho = -0.2;  // below -1/(n-1)
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.rho = -1.0 / 9.0 + 1e-6;
  CHECK_NOTHROW(config.validate());
  config.cov = CovarianceKind::Ar1;
  config.rho = 1.0;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.rho = -0.9;
  CHECK_NOTHROW(config.validate());
  config.cov = CovarianceKind::Iid;
  config.rho = 0.1;
  CHECK_THROWS_AS(config.validate(), ValidationError);

  CHECK(covariance_from_string("ar1") == CovarianceKind::Ar1);
  CHECK_THROWS_AS(covariance_from_string("toeplitz"), ValidationError);
}

TEST_CASE("cholesky factor reproduces the spiked and AR-1 covariances") {
  auto config = base_config(6);
  config.cov = CovarianceKind::Spiked;
  config.rho = 0.4;
  for (auto kind : {CovarianceKind::Spiked, CovarianceKind::Ar1}) {
    config.cov = kind;
    const auto chol = covariance_cholesky(config);
    const std::size_t n = config.n;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += chol[i * n + k] * chol[j * n + k];
        const double want =
            (i == j) ? 1.0
                     : (kind == CovarianceKind::Spiked
                            ? config.rho
                            : std::pow(config.rho, std::abs(static_cast<double>(i) -
                                                            static_cast<double>(j))));
        CHECK(dot == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }

  // boundary rho = 1 stays PSD-factorizable
  config.cov = CovarianceKind::Spiked;
  config.rho = 1.0;
  CHECK_NOTHROW(covariance_cholesky(config));
}

TEST_CASE("reports carry counts within bounds and matching standard errors") {
  auto config = base_config(15);
  config.s_true = 5;
  config.signal = 1.2;
  config.trials = 80;
  const auto report = run_scenario(config);
  REQUIRE(report.methods.size() == 1);
  const auto& m = report.methods[0];
  CHECK(m.true_rej_mean >= 0.0);
  CHECK(m.true_rej_mean <= 5.0);
  CHECK(m.false_rej_mean <= 10.0);
  CHECK(m.fwer >= 0.0);
  CHECK(m.fwer <= 1.0);
  CHECK(m.fwer_se == doctest::Approx(std::sqrt(m.fwer * (1 - m.fwer) / 80.0)).epsilon(1e-12));
}

TEST_CASE("csv emission is byte-identical across runs and schema-stable") {
  auto config = base_config(12);
  config.s_true = 3;
  config.signal = 1.0;
  config.cov = CovarianceKind::Ar1;
  config.rho = 0.3;
  config.trials = 40;

  std::ostringstream a, b;
  sweep(std::vector<ScenarioConfig>{config, config}, a);
  sweep(std::vector<ScenarioConfig>{config, config}, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("method,n,s_true,s_param,M,cov,rho,trials,fwer,fwer_se,true_rej_mean,"
                      "true_rej_se,false_rej_mean,false_rej_se,seed\n", 0) == 0);

  std::ostringstream empty;
  sweep(std::vector<ScenarioConfig>{}, empty);
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");

  // a different seed changes the rows
  auto other = config;
  other.seed = 7;
  std::ostringstream c;
  sweep(std::vector<ScenarioConfig>{other}, c);
  CHECK(a.str() != c.str());
}

TEST_CASE("under the global null the simes closure controls the FWER") {
  auto config = base_config(25);
  config.trials = 1000;
  const auto report = run_scenario(config);
  const double bound = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 1000.0);
  CHECK(report.methods[0].fwer <= bound);
  CHECK(report.methods[0].true_rej_mean == 0.0);  // no true alternatives exist
}
