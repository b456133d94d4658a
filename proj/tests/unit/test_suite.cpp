#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruinlab/config.hpp"
#include "ruinlab/report.hpp"
#include "ruinlab/suite.hpp"

using namespace ruinlab;
namespace fs = std::filesystem;

namespace {

const char* kSuite = R"(seed = 11
[ruin ruin_cs]
distribution = pareto{alpha=1.5}
dependence = common_shock{law=uniform, max=1}
intensity = sinusoidal{base=10, amplitude=5, period=6.283185307179586}
interest = 0.05
horizon = 1
premium = 60
tail_scales = [0.1, 0.01, 0.001]
paths = 4000

[weighted-sums ws]
distribution = pareto{alpha=1.5}
weights = uniform{n=3, lo=0.5, hi=2}
tail_scales = [0.01, 0.001]
paths = 4000

[weighted-sums lattice]
distribution = pareto{alpha=1.5}
weights = lattice{n=2, lo=0.5, hi=2, points=3}
tail_scales = [0.01]
paths = 2000

[weighted-sums kesten]
distribution = pareto{alpha=1.5}
weights = kesten{eps=0.1, n_max=4}
tail_scales = [0.001]
paths = 2000

[diagnose-dist diag]
distribution = lognormal{mu=0, sigma=1}
tail_scales = [0.01, 1e-6]

[validate-assumptions probe]
distribution = pareto{alpha=1.5}
dependence = common_shock{law=uniform, max=1}
x_grid = [100, 1000, 10000]

[poisson-check pois]
intensity = sinusoidal{base=0.5, amplitude=0.25, period=6.283185307179586}
horizon = 6.283185307179586
samples = 2000
conditional_samples = 500
)";

const char* kFailing = R"(
[poisson-check impossible]
intensity = constant{rate=200}
horizon = 1
n = 3
samples = 1000
conditional_samples = 100
)";

class SuiteTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("ruinlab_suite_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  std::string dir(const std::string& leaf) const { return (root_ / leaf).string(); }
  fs::path root_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

nlohmann::json manifest(const std::string& dir) { return nlohmann::json::parse(slurp(fs::path(dir) / "manifest.json")); }

RunOptions options(const std::string& out) {
  RunOptions o;
  o.out_dir = out;
  return o;
}

}  // namespace

TEST_F(SuiteTest, RerunsAreByteIdentical) {
  const auto suite = parse_config(kSuite);
  const auto a = run_suite(suite, options(dir("a")));
  const auto b = run_suite(suite, options(dir("b")));
  ASSERT_TRUE(a.ok);
  ASSERT_TRUE(b.ok);
  for (const auto& e : a.experiments) {
    ASSERT_TRUE(e.csv);
    EXPECT_EQ(slurp(fs::path(dir("a")) / *e.csv), slurp(fs::path(dir("b")) / *e.csv)) << e.name;
  }
  EXPECT_EQ(manifest(dir("a"))["config_hash"], manifest(dir("b"))["config_hash"]);
}

TEST_F(SuiteTest, ParallelAndWorkerCountDoNotChangeOutput) {
  const auto suite = parse_config(kSuite);
  auto seq = options(dir("seq"));
  seq.workers = 1;
  auto par = options(dir("par"));
  par.parallel = true;
  par.workers = 3;
  const auto a = run_suite(suite, seq);
  const auto b = run_suite(suite, par);
  for (const auto& e : a.experiments) {
    EXPECT_EQ(slurp(fs::path(dir("seq")) / *e.csv), slurp(fs::path(dir("par")) / *e.csv)) << e.name;
  }
  EXPECT_EQ(manifest(dir("par"))["parallel_experiments"], true);
}

TEST_F(SuiteTest, ManifestIsComplete) {
  auto o = options(dir("m"));
  o.plots = true;
  const auto out = run_suite(parse_config(kSuite), o);
  ASSERT_TRUE(out.ok);
  const auto m = manifest(dir("m"));
  EXPECT_EQ(m["tool"], "ruinlab");
  EXPECT_EQ(m["version"], version_string());
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["seed"], 11);
  EXPECT_EQ(m["seed_source"], "config");
  EXPECT_TRUE(m["paths_override"].is_null());
  EXPECT_TRUE(m["wall_time_seconds"].is_number());
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump_config(parse_config(kSuite)))));
  EXPECT_EQ(m["config_hash"], std::string("fnv1a64:") + hex);

  std::multiset<std::string> referenced;
  std::set<std::string> names;
  const auto suite = parse_config(kSuite);
  ASSERT_EQ(m["experiments"].size(), suite.experiments.size());
  for (std::size_t i = 0; i < suite.experiments.size(); ++i) {
    const auto& e = m["experiments"][i];
    EXPECT_EQ(e["name"], suite.experiments[i].name);
    EXPECT_EQ(e["type"], to_string(suite.experiments[i].type()));
    EXPECT_EQ(e["seed"], suite.experiment_seed(i));
    EXPECT_EQ(e["status"], "ok");
    EXPECT_TRUE(e["wall_time_seconds"].is_number());
    referenced.insert(e["csv"].get<std::string>());
    if (!e["plot"].is_null()) referenced.insert(e["plot"].get<std::string>());
  }
  for (const auto& entry : fs::directory_iterator(dir("m"))) {
    const auto leaf = entry.path().filename().string();
    if (leaf == "manifest.json") continue;
    EXPECT_EQ(referenced.count(leaf), 1u) << leaf;
  }
  EXPECT_EQ(referenced.count("ruin_cs.svg"), 1u);
  EXPECT_NE(slurp(fs::path(dir("m")) / "ruin_cs.svg").find("<svg"), std::string::npos);
}

TEST_F(SuiteTest, PathsOverrideIsRecorded) {
  auto o = options(dir("p"));
  o.paths = 2000;
  o.seed = 5;
  const auto out = run_suite(parse_config(kSuite), o);
  ASSERT_TRUE(out.ok);
  const auto m = manifest(dir("p"));
  EXPECT_EQ(m["paths_override"]["value"], 2000);
  EXPECT_EQ(m["paths_override"]["source"], "--paths");
  EXPECT_EQ(m["paths_override"]["original"]["ruin_cs"], 4000);
  EXPECT_EQ(m["paths_override"]["original"]["lattice"], 2000);
  EXPECT_FALSE(m["paths_override"]["original"].contains("diag"));
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["seed_source"], "--seed");
  const auto rows = read_csv(fs::path(dir("p")) / "ruin_cs.csv");
  EXPECT_EQ(rows[1][column(rows[0], "paths")], "2000");
  // The hash identifies the configuration file, not the overrides.
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump_config(parse_config(kSuite)))));
  EXPECT_EQ(m["config_hash"], std::string("fnv1a64:") + hex);
}

TEST_F(SuiteTest, RuinRatioColumnRecomputes) {
  ASSERT_TRUE(run_suite(parse_config(kSuite), options(dir("r"))).ok);
  const auto rows = read_csv(fs::path(dir("r")) / "ruin_cs.csv");
  ASSERT_EQ(rows.size(), 4u);
  const auto& h = rows[0];
  for (const char* col : {"x", "psi_hat", "se", "ci_lo", "ci_hi", "asymptotic", "ratio", "estimator", "paths", "seed"})
    column(h, col);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double psi = std::stod(rows[i][column(h, "psi_hat")]);
    const double asym = std::stod(rows[i][column(h, "asymptotic")]);
    const double ratio = std::stod(rows[i][column(h, "ratio")]);
    EXPECT_NEAR(ratio, psi / asym, 1e-12 * std::abs(ratio));
    EXPECT_LE(std::stod(rows[i][column(h, "ci_lo")]), psi);
    EXPECT_GE(std::stod(rows[i][column(h, "ci_hi")]), psi);
  }
}

TEST_F(SuiteTest, FailureIsMarkedAndOthersKept) {
  const auto suite = parse_config(std::string(kSuite) + kFailing);
  const auto out = run_suite(suite, options(dir("f")));
  EXPECT_FALSE(out.ok);
  const auto m = manifest(dir("f"));
  EXPECT_EQ(m["status"], "failed");
  const auto& last = m["experiments"].back();
  EXPECT_EQ(last["name"], "impossible");
  EXPECT_EQ(last["status"], "failed");
  EXPECT_TRUE(last["csv"].is_null());
  EXPECT_FALSE(last["error"].get<std::string>().empty());
  for (std::size_t i = 0; i + 1 < m["experiments"].size(); ++i) {
    EXPECT_EQ(m["experiments"][i]["status"], "ok");
    EXPECT_TRUE(fs::exists(fs::path(dir("f")) / m["experiments"][i]["csv"].get<std::string>()));
  }
}

TEST(Execute, TableShapes) {
  const auto suite = parse_config(kSuite);
  const std::map<std::string, std::vector<std::string>> first_columns = {
      {"ruin_cs", {"x", "psi_hat", "se"}},     {"ws", {"x", "weights", "p_sum"}},
      {"lattice", {"x", "weights", "p_sum"}},  {"kesten", {"x", "n", "p_sum"}},
      {"diag", {"x", "tail", "log_tail"}},     {"probe", {"x", "h", "r"}},
      {"pois", {"metric", "value", "reference"}}};
  for (std::size_t i = 0; i < suite.experiments.size(); ++i) {
    const auto& e = suite.experiments[i];
    const auto r = execute_experiment(e, suite.experiment_seed(i), 1);
    const auto& want = first_columns.at(e.name);
    ASSERT_GE(r.table.header.size(), want.size()) << e.name;
    for (std::size_t c = 0; c < want.size(); ++c) EXPECT_EQ(r.table.header[c], want[c]) << e.name;
    EXPECT_FALSE(r.table.rows.empty()) << e.name;
    for (const auto& row : r.table.rows) EXPECT_EQ(row.size(), r.table.header.size()) << e.name;
  }
  // Lattice rows: one per lattice point and x.
  EXPECT_EQ(execute_experiment(suite.experiments[2], 1, 1).table.rows.size(), 9u);
  EXPECT_EQ(execute_experiment(suite.experiments[3], 1, 1).table.rows.size(), 4u);
}

TEST(Execute, PoissonCheckReport) {
  PoissonCheckSpec spec{IntensityModel::sinusoidal(0.5, 0.25, 6.283185307179586), 6.283185307179586, 3, 20000, 5000};
  const auto rep = run_poisson_check(spec, 3);
  EXPECT_NEAR(rep.cumulative, M_PI, 1e-12);
  EXPECT_NEAR(rep.count_mean, M_PI, 4.0 * std::sqrt(M_PI / 20000));
  EXPECT_GT(rep.chi2_p_value, 1e-3);
  EXPECT_LT(rep.ks_conditional, 0.03);
  EXPECT_EQ(rep.thinning_runs, 20000u);
  EXPECT_EQ(rep.conditional_runs, 5000u);
  const auto again = run_poisson_check(spec, 3);
  EXPECT_EQ(rep.ks_conditional, again.ks_conditional);
}

TEST(Report, CsvQuotingAndSvg) {
  Table t{{"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", "2"}}};
  EXPECT_EQ(t.to_csv(), "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",2\n");
  Plot p;
  p.title = "ratio <&>";
  p.series.push_back({"s", {1, 10, 100}, {2.0, 1.5, 1.1}});
  const auto svg = render_svg(p);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("ratio &lt;&amp;&gt;"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
