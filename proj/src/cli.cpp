#include "fact/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "fact/critical_values.hpp"
#include "fact/engine.hpp"
#include "fact/fusion.hpp"
#include "fact/oracle.hpp"
#include "fact/rng.hpp"
#include "fact/sim.hpp"

namespace fact::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kCalibrationLabel = 0xCA11BULL;
constexpr std::size_t kCalibrationSamples = 100000;

struct MethodOptions {
  double alpha = 0.05;
  double tau = 0.0;     // 0 = default to alpha (also Wilkinson's threshold)
  double alpha0 = 0.5;
  std::size_t sparsity = 0;
  std::size_t calib_samples = kCalibrationSamples;
  std::uint64_t seed = 1;
  std::filesystem::path cache_dir = "fact-cache";

  std::uint64_t calibration_seed() const { return rng::derive_seed(seed, kCalibrationLabel); }
  double threshold_or_alpha() const { return tau > 0.0 ? tau : alpha; }
};

std::shared_ptr<const LocalTest> make_calibrated(std::unique_ptr<CalibratedTest> test,
                                                 std::size_t n, const MethodOptions& opt) {
  auto table = load_or_calibrate(*test, n, Alpha(opt.alpha), opt.calib_samples,
                                 opt.calibration_seed(), opt.cache_dir);
  test->attach_table(std::make_shared<const CriticalValueTable>(std::move(table)));
  return std::shared_ptr<const LocalTest>(std::move(test));
}

std::shared_ptr<const RulePlan> build_plan(const std::string& method, std::size_t n,
                                           const MethodOptions& opt) {
  auto uniform = [n](std::shared_ptr<const LocalTest> test) {
    return std::make_shared<const RulePlan>(uniform_plan(std::move(test), n));
  };
  if (method == "bonferroni") return uniform(std::make_shared<const BonferroniTest>());
  if (method == "simes") return uniform(std::make_shared<const SimesTest>());
  if (method == "fisher") return uniform(std::make_shared<const FisherTest>());
  if (method == "stouffer") return uniform(std::make_shared<const StoufferTest>());
  if (method == "wilkinson") {
    return uniform(std::make_shared<const WilkinsonTest>(opt.threshold_or_alpha()));
  }
  if (method == "hybrid-hochberg-hommel") {
    return uniform(std::make_shared<const HybridHochbergHommelTest>(
        HybridHochbergHommelTest::hochberg_defaults(n)));
  }
  if (method == "truncated-product") {
    return uniform(make_calibrated(
        std::make_unique<TruncatedProductTest>(opt.threshold_or_alpha()), n, opt));
  }
  if (method == "higher-criticism") {
    return uniform(make_calibrated(std::make_unique<HigherCriticismTest>(opt.alpha0), n, opt));
  }
  if (method == "simes-hc") {
    if (opt.sparsity < 1) {
      throw ValidationError("method simes-hc needs --sparsity >= 1");
    }
    if (opt.sparsity > n) {
      throw ValidationError("--sparsity cannot exceed the number of hypotheses");
    }
    FusionSpec spec;
    spec.n = n;
    spec.sparsity = opt.sparsity;
    spec.small_test = std::make_shared<const SimesTest>();
    if (spec.cutoff() < n) {
      spec.large_test =
          make_calibrated(std::make_unique<HigherCriticismTest>(opt.alpha0), n, opt);
    } else {
      spec.large_test = spec.small_test;
    }
    return std::make_shared<const RulePlan>(simes_hc_plan(spec, Alpha(opt.alpha)));
  }
  throw ValidationError("unknown method '" + method +
                        "' (want bonferroni, simes, fisher, stouffer, wilkinson, "
                        "truncated-product, higher-criticism, simes-hc, or "
                        "hybrid-hochberg-hommel)");
}

PValueVector read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  return parse_pvalue_csv(in);
}

void write_output(const std::string& out_path, const std::string& payload, std::ostream& out) {
  if (out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
  f << payload;
  if (!f.good()) throw std::runtime_error("write failed for '" + out_path + "'");
}

std::string fmt(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// --- subcommand bodies -----------------------------------------------------

int cmd_test(const std::string& input, const std::string& method, const MethodOptions& opt,
             const std::string& format, const std::string& out_path, std::ostream& out) {
  const auto pvec = read_input(input);
  const auto sorted = sort_pvalues(pvec);
  const auto plan = build_plan(method, pvec.size(), opt);
  const auto result = fact_reject(sorted, *plan, Alpha(opt.alpha));

  std::string payload;
  if (format == "json") {
    ordered_json doc;
    doc["alpha"] = opt.alpha;
    doc["method"] = method;
    doc["n"] = pvec.size();
    doc["rejected_ids"] = result.rejected_ids;
    doc["diagnostics"] = {{"local_test_calls", result.local_test_calls},
                          {"stop_stage", result.stop_stage}};
    payload = doc.dump(2) + "\n";
  } else {
    const std::unordered_set<std::string> rejected(result.rejected_ids.begin(),
                                                   result.rejected_ids.end());
    payload = "id,p,rejected\n";
    for (std::size_t i = 0; i < pvec.size(); ++i) {
      payload += pvec.ids[i] + "," + fmt(pvec.values[i]) + "," +
                 (rejected.count(pvec.ids[i]) ? "1" : "0") + "\n";
    }
  }
  write_output(out_path, payload, out);
  return 0;
}

int cmd_adjust(const std::string& input, const std::string& method, const MethodOptions& opt,
               const std::string& format, const std::string& out_path, std::ostream& out) {
  const auto pvec = read_input(input);
  const auto sorted = sort_pvalues(pvec);
  const auto plan = build_plan(method, pvec.size(), opt);
  const auto adjusted = fact_adjusted(sorted, *plan);

  std::unordered_map<std::string, double> adj_by_id;
  for (std::size_t r = 0; r < adjusted.rank_to_id.size(); ++r) {
    adj_by_id[adjusted.rank_to_id[r]] = adjusted.adjusted[r];
  }

  std::string payload;
  if (format == "json") {
    ordered_json doc;
    doc["alpha"] = opt.alpha;
    doc["method"] = method;
    doc["n"] = pvec.size();
    auto rows = ordered_json::array();
    for (std::size_t i = 0; i < pvec.size(); ++i) {
      rows.push_back({{"id", pvec.ids[i]},
                      {"p", pvec.values[i]},
                      {"p_adj", adj_by_id.at(pvec.ids[i])}});
    }
    doc["adjusted"] = std::move(rows);
    payload = doc.dump(2) + "\n";
  } else {
    payload = "id,p,p_adj\n";
    for (std::size_t i = 0; i < pvec.size(); ++i) {
      payload += pvec.ids[i] + "," + fmt(pvec.values[i]) + "," +
                 fmt(adj_by_id.at(pvec.ids[i])) + "\n";
    }
  }
  write_output(out_path, payload, out);
  return 0;
}

int cmd_verify(const std::string& input, const std::string& method, const MethodOptions& opt,
               std::ostream& out) {
  const auto pvec = read_input(input);
  if (pvec.size() > kBruteForceCap) {
    throw ValidationError("verify enumerates all 2^n subsets and is capped at n = " +
                          std::to_string(kBruteForceCap) + "; got n = " +
                          std::to_string(pvec.size()));
  }
  const auto sorted = sort_pvalues(pvec);
  const auto plan = build_plan(method, pvec.size(), opt);
  const Alpha alpha(opt.alpha);

  const auto fact_result = fact_reject(sorted, *plan, alpha);
  const auto oracle = brute_force_closure_detailed(sorted, *plan, alpha);

  std::unordered_set<std::string> fact_set(fact_result.rejected_ids.begin(),
                                           fact_result.rejected_ids.end());
  std::unordered_set<std::string> oracle_set(oracle.result.rejected_ids.begin(),
                                             oracle.result.rejected_ids.end());
  if (fact_set == oracle_set) {
    out << "match: " << fact_result.rejected_count << " rejections, "
        << fact_result.local_test_calls << " local-test calls (closure used "
        << oracle.result.local_test_calls << ")\n";
    return 0;
  }
  out << "MISMATCH: fact rejected " << fact_result.rejected_count << ", closure rejected "
      << oracle.result.rejected_count << "\n";
  for (std::size_t r = 1; r <= sorted.size(); ++r) {
    const bool in_fact = fact_set.count(sorted.id_at(r)) > 0;
    const bool in_oracle = oracle.first_failing_subset[r - 1] == 0;
    if (in_fact != in_oracle) {
      out << "  rank " << r << " (id " << sorted.id_at(r) << "): fact=" << in_fact
          << " closure=" << in_oracle;
      if (!in_oracle) {
        out << " first non-rejected subset mask=0x" << std::hex
            << oracle.first_failing_subset[r - 1] << std::dec;
      }
      out << "\n";
    }
  }
  return 1;
}

int cmd_calibrate(const std::string& method, std::size_t n, const MethodOptions& opt,
                  std::ostream& out) {
  if (n < 1) throw ValidationError("calibrate needs --n >= 1");
  std::unique_ptr<CalibratedTest> test;
  if (method == "higher-criticism" || method == "simes-hc") {
    test = std::make_unique<HigherCriticismTest>(opt.alpha0);
  } else if (method == "truncated-product") {
    test = std::make_unique<TruncatedProductTest>(opt.threshold_or_alpha());
  } else {
    throw ValidationError("method '" + method +
                          "' uses analytic critical values; nothing to calibrate");
  }
  const auto table = load_or_calibrate(*test, n, Alpha(opt.alpha), opt.calib_samples,
                                       opt.calibration_seed(), opt.cache_dir);
  out << "calibrated " << table.test_name << " [" << table.params << "] sizes 1.." << n
      << " at alpha=" << fmt(table.alpha) << " B=" << table.samples << "\n"
      << "cache file: " << table_cache_path(opt.cache_dir, table).string() << "\n";
  return 0;
}

int cmd_simulate(const std::vector<std::string>& methods, std::size_t n, std::size_t s_true,
                 double signal, const std::string& cov, double rho, std::size_t trials,
                 const MethodOptions& opt, const std::string& out_path, std::ostream& out) {
  sim::ScenarioConfig config;
  config.n = n;
  config.s_true = s_true;
  config.signal = signal;
  config.cov = sim::covariance_from_string(cov);
  config.rho = rho;
  config.trials = trials;
  config.alpha = opt.alpha;
  config.seed = opt.seed;

  MethodOptions plan_opt = opt;
  if (plan_opt.sparsity == 0) plan_opt.sparsity = s_true;  // fusion parameter defaults to truth
  for (const auto& name : methods) {
    sim::MethodSpec spec;
    spec.name = name;
    spec.plan = build_plan(name, n, plan_opt);
    spec.s_param = (name == "simes-hc") ? plan_opt.sparsity : 0;
    config.methods.push_back(std::move(spec));
  }

  std::ostringstream csv;
  sim::write_csv_header(csv);
  sim::write_csv_rows(csv, sim::run_scenario(config));
  write_output(out_path, csv.str(), out);
  return 0;
}

}  // namespace

PValueVector parse_pvalue_csv(std::istream& in) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
      s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };
  auto parse_p = [&](std::string_view field, std::size_t line_no, double& value) {
    field = trim(field);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return false;
    if (std::isnan(value)) {
      throw ValidationError("line " + std::to_string(line_no) + ": p-value is NaN");
    }
    return true;
  };

  PValueVector out;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_line = true;
  bool with_ids = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;

    const auto comma = content.find(',');
    std::string_view id_field =
        (comma == std::string_view::npos) ? std::string_view{} : content.substr(0, comma);
    std::string_view p_field =
        (comma == std::string_view::npos) ? content : content.substr(comma + 1);

    double p = 0.0;
    if (!parse_p(p_field, line_no, p)) {
      if (first_data_line) continue;  // header line
      throw ValidationError("line " + std::to_string(line_no) + ": cannot parse p-value '" +
                            std::string(trim(p_field)) + "'");
    }
    if (first_data_line) {
      with_ids = comma != std::string_view::npos;
      first_data_line = false;
    } else if ((comma != std::string_view::npos) != with_ids) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": mixed row shapes (expected all rows to be '" +
                            (with_ids ? "id,p" : "p") + "')");
    }
    out.values.push_back(p);
    if (with_ids) out.ids.push_back(std::string(trim(id_field)));
  }
  if (out.values.empty()) throw ValidationError("input contains no p-values");
  if (!with_ids) {
    for (std::size_t i = 0; i < out.values.size(); ++i) out.ids.push_back(std::to_string(i + 1));
  }
  out.validate();
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fast closed testing for multiple hypotheses"};
  app.require_subcommand(1);

  MethodOptions opt;
  std::string input, method, format = "json", out_path, cov = "iid";
  std::string cache_dir = "fact-cache";
  std::size_t n = 0, trials = 0;
  double signal = 0.0, rho = 0.0;
  std::vector<std::string> sim_methods;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) {
      cmd->add_option("--input", input, "CSV file: one p-value per line or id,p rows")
          ->required();
    }
    cmd->add_option("--alpha", opt.alpha, "family-wise error rate target (default 0.05)");
    cmd->add_option("--seed", opt.seed, "master seed; all stochastic streams derive from it");
    cmd->add_option("--cache-dir", cache_dir, "calibration table cache directory");
    cmd->add_option("--sparsity", opt.sparsity, "sparsity guess s for simes-hc");
    cmd->add_option("--tau", opt.tau,
                    "truncation threshold for truncated-product (also Wilkinson's d); "
                    "defaults to alpha");
    cmd->add_option("--alpha0", opt.alpha0, "higher-criticism index fraction (default 0.5)");
  };

  auto* t = app.add_subcommand("test", "run FACT rejections on a p-value file");
  add_common(t, true);
  t->add_option("--method", method, "local testing rule")->required();
  t->add_option("--format", format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  t->add_option("--out", out_path, "write output to this path instead of stdout");

  auto* a = app.add_subcommand("adjust", "emit FACT adjusted p-values");
  add_common(a, true);
  a->add_option("--method", method, "local testing rule")->required();
  a->add_option("--format", format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  a->add_option("--out", out_path, "write output to this path instead of stdout");

  auto* v = app.add_subcommand("verify", "compare FACT against exhaustive closed testing");
  add_common(v, true);
  v->add_option("--method", method, "local testing rule")->required();

  auto* c = app.add_subcommand("calibrate", "pre-build Monte-Carlo critical value tables");
  add_common(c, false);
  c->add_option("--method", method, "higher-criticism, truncated-product, or simes-hc")
      ->required();
  c->add_option("--n", n, "largest subset size to calibrate")->required();
  c->add_option("--trials", opt.calib_samples, "Monte-Carlo sample count B (default 100000)");

  auto* s = app.add_subcommand("simulate", "normal-means Monte-Carlo experiment, CSV output");
  add_common(s, false);
  s->add_option("--method", sim_methods, "methods to compare (repeatable or comma-separated)")
      ->required()
      ->delimiter(',');
  s->add_option("--n", n, "number of hypotheses")->required();
  s->add_option("--signal", signal, "global signal strength M");
  s->add_option("--cov", cov, "covariance: iid, spiked, or ar1")
      ->check(CLI::IsMember({"iid", "spiked", "ar1"}));
  s->add_option("--rho", rho, "correlation coefficient");
  s->add_option("--trials", trials, "Monte-Carlo trials")->required();
  s->add_option("--out", out_path, "write CSV to this path instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 pops from the back
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e, out, err);
    }
    err << "error: usage: " << e.what() << "\n";
    return 2;
  }

  opt.cache_dir = cache_dir;
  try {
    if (t->parsed()) return cmd_test(input, method, opt, format, out_path, out);
    if (a->parsed()) return cmd_adjust(input, method, opt, format, out_path, out);
    if (v->parsed()) return cmd_verify(input, method, opt, out);
    if (c->parsed()) return cmd_calibrate(method, n, opt, out);
    if (s->parsed()) {
      return cmd_simulate(sim_methods, n, opt.sparsity, signal, cov, rho, trials, opt,
                          out_path, out);
    }
  } catch (const ValidationError& e) {
    err << "error: validation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << "\n";
    return 1;
  }
  err << "error: usage: no subcommand selected\n";
  return 2;
}

}  // namespace fact::cli
