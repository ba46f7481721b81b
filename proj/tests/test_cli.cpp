#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fact/cli.hpp"

using namespace fact;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / "fact-cli-test") {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("csv input parsing") {
  std::istringstream plain("0.2\n0.05\n\n0.9\n");
  const auto a = cli::parse_pvalue_csv(plain);
  CHECK(a.values == std::vector<double>{0.2, 0.05, 0.9});
  CHECK(a.ids == std::vector<HypothesisId>{"1", "2", "3"});

  std::istringstream with_ids("id,p\nsnp1, 0.2\n snp2,0.05\r\n");
  const auto b = cli::parse_pvalue_csv(with_ids);
  CHECK(b.ids == std::vector<HypothesisId>{"snp1", "snp2"});

  std::istringstream empty("\n\n");
  CHECK_THROWS_AS(cli::parse_pvalue_csv(empty), ValidationError);

  std::istringstream bad("0.2\nnope\n");
  CHECK_THROWS_WITH_AS(cli::parse_pvalue_csv(bad), doctest::Contains("line 2"),
                       ValidationError);

  std::istringstream out_of_range("0.2\n1.5\n");
  CHECK_THROWS_AS(cli::parse_pvalue_csv(out_of_range), ValidationError);

  std::istringstream mixed("0.2\nid,0.1\n");
  CHECK_THROWS_AS(cli::parse_pvalue_csv(mixed), ValidationError);
}

TEST_CASE("test subcommand rejects the holm example rows") {
  TempDir tmp;
  const auto input = tmp.file("p.csv", "0.01\n0.02\n0.2\n");
  const auto res = run_cli({"test", "--input", input.string(), "--method", "bonferroni",
                            "--alpha", "0.05"});
  REQUIRE(res.code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  CHECK(doc["method"] == "bonferroni");
  CHECK(doc["n"] == 3);
  CHECK(doc["rejected_ids"] == nlohmann::json::array({"1", "2"}));
  CHECK(doc["diagnostics"]["local_test_calls"].get<int>() <= 9);

  // csv flavor carries per-hypothesis flags in input order
  const auto csv = run_cli({"test", "--input", input.string(), "--method", "bonferroni",
                            "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out == "id,p,rejected\n1,0.01,1\n2,0.02,1\n3,0.2,0\n");
}

TEST_CASE("validation failures exit with code 2 and a parseable reason") {
  TempDir tmp;
  const auto empty = tmp.file("empty.csv", "\n");
  const auto res = run_cli({"test", "--input", empty.string(), "--method", "simes"});
  CHECK(res.code == 2);
  CHECK(res.err.rfind("error: validation:", 0) == 0);

  const auto missing = run_cli({"test", "--input", "/nonexistent.csv", "--method", "simes"});
  CHECK(missing.code == 2);

  const auto input = tmp.file("p.csv", "0.01\n");
  const auto unknown = run_cli({"test", "--input", input.string(), "--method", "anova"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("unknown method") != std::string::npos);

  const auto usage = run_cli({"test", "--method", "simes"});  // --input required
  CHECK(usage.code == 2);
  CHECK(usage.err.rfind("error: usage:", 0) == 0);

  const auto no_sparsity = run_cli({"test", "--input", input.string(), "--method", "simes-hc"});
  CHECK(no_sparsity.code == 2);
}

TEST_CASE("adjust emits holm-style adjusted p-values") {
  TempDir tmp;
  const auto input = tmp.file("p.csv", "0.01\n0.5\n");
  const auto res = run_cli({"adjust", "--input", input.string(), "--method", "bonferroni"});
  REQUIRE(res.code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  CHECK(doc["adjusted"][0]["id"] == "1");
  CHECK(doc["adjusted"][0]["p_adj"].get<double>() == doctest::Approx(0.02));
  CHECK(doc["adjusted"][1]["p_adj"].get<double>() == doctest::Approx(0.5));

  const auto ones = tmp.file("ones.csv", "1\n1\n1\n");
  const auto all_ones = run_cli({"adjust", "--input", ones.string(), "--method", "simes",
                                 "--format", "csv"});
  REQUIRE(all_ones.code == 0);
  CHECK(all_ones.out == "id,p,p_adj\n1,1,1\n2,1,1\n3,1,1\n");
}

TEST_CASE("adjusted p-values thresholded at alpha reproduce the test subcommand") {
  TempDir tmp;
  const auto input = tmp.file("p.csv", "0.004\n0.021\n0.03\n0.047\n0.21\n0.8\n");
  const auto adj = run_cli({"adjust", "--input", input.string(), "--method", "simes"});
  REQUIRE(adj.code == 0);
  const auto table = nlohmann::json::parse(adj.out)["adjusted"];

  for (const char* alpha : {"0.01", "0.05", "0.11", "0.3", "0.9"}) {
    const auto res = run_cli({"test", "--input", input.string(), "--method", "simes",
                              "--alpha", alpha});
    REQUIRE(res.code == 0);
    const auto rejected = nlohmann::json::parse(res.out)["rejected_ids"];
    std::size_t via_adjusted = 0;
    for (const auto& row : table) {
      if (row["p_adj"].get<double>() <= std::stod(alpha)) ++via_adjusted;
    }
    CHECK(rejected.size() == via_adjusted);
  }
}

TEST_CASE("verify matches fact against the exhaustive closure and enforces the cap") {
  TempDir tmp;
  const auto input = tmp.file("p.csv", "0.001\n0.02\n0.04\n0.3\n0.5\n0.77\n0.9\n0.95\n0.99\n0.6\n");
  const auto ok = run_cli({"verify", "--input", input.string(), "--method", "simes"});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("match", 0) == 0);

  std::string big;
  for (int i = 0; i < 25; ++i) big += "0.5\n";
  const auto capped = run_cli({"verify", "--input", tmp.file("big.csv", big).string(),
                               "--method", "simes"});
  CHECK(capped.code == 2);
  CHECK(capped.err.find("capped") != std::string::npos);
}

TEST_CASE("calibrate writes a reusable cache that test picks up") {
  TempDir tmp;
  const auto cache = (tmp.path() / "cache").string();
  const auto cal = run_cli({"calibrate", "--method", "higher-criticism", "--n", "12",
                            "--trials", "5000", "--seed", "5", "--cache-dir", cache});
  REQUIRE(cal.code == 0);
  CHECK(cal.out.find("cache file:") != std::string::npos);
  CHECK(fs::directory_iterator(cache) != fs::directory_iterator{});

  // analytic methods have nothing to calibrate
  const auto nada = run_cli({"calibrate", "--method", "simes", "--n", "5"});
  CHECK(nada.code == 2);
}

TEST_CASE("cli reruns are byte-identical, and simes-hc runs end to end") {
  TempDir tmp;
  std::string rows;
  for (int i = 0; i < 20; ++i) rows += std::to_string((i + 1) * 0.002) + "\n";
  const auto input = tmp.file("p.csv", rows);
  const auto cache = (tmp.path() / "cache").string();

  std::vector<std::string> args{"test",  "--input",   input.string(), "--method", "simes-hc",
                                "--sparsity", "4",    "--seed",       "11",
                                "--cache-dir", cache};
  const auto first = run_cli(args);
  REQUIRE(first.code == 0);
  const auto second = run_cli(args);  // cache hit path
  CHECK(second.code == 0);
  CHECK(first.out == second.out);
  CHECK(!nlohmann::json::parse(first.out)["rejected_ids"].empty());
}

TEST_CASE("simulate emits the fixed csv schema") {
  TempDir tmp;
  const auto out_path = tmp.path() / "grid.csv";
  const auto res = run_cli({"simulate", "--method", "simes,fisher", "--n", "15", "--sparsity",
                            "3", "--signal", "1.5", "--trials", "30", "--seed", "3", "--out",
                            out_path.string()});
  REQUIRE(res.code == 0);
  std::ifstream f(out_path);
  std::string header, row1, row2;
  std::getline(f, header);
  std::getline(f, row1);
  std::getline(f, row2);
  CHECK(header ==
        "method,n,s_true,s_param,M,cov,rho,trials,fwer,fwer_se,true_rej_mean,true_rej_se,"
        "false_rej_mean,false_rej_se,seed");
  CHECK(row1.rfind("simes,15,3,0,1.5,iid,0,30,", 0) == 0);
  CHECK(row2.rfind("fisher,15,3,0,", 0) == 0);

  const auto again = run_cli({"simulate", "--method", "simes,fisher", "--n", "15", "--sparsity",
                              "3", "--signal", "1.5", "--trials", "30", "--seed", "3"});
  REQUIRE(again.code == 0);
  std::ifstream f2(out_path);
  std::stringstream whole;
  whole << f2.rdbuf();
  CHECK(again.out == whole.str());
}

TEST_CASE("help is reachable") {
  const auto res = run_cli({"--help"});
  CHECK(res.code == 0);
}
