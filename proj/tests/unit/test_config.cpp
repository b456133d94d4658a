#include <gtest/gtest.h>

#include <string>

#include "ruinlab/config.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/rng.hpp"

using namespace ruinlab;

namespace {

const char* kRuin = R"(# demo
seed = 42
out_dir = out

[ruin indep]
distribution = pareto{alpha=1.5, scale=1.0}
dependence = independent
intensity = sinusoidal{base=10, amplitude=5, period=6.283185307179586}
interest = 0.05
horizon = 1
premium = 55.35
tail_scales = [1e-1, 1e-2, 1e-3, 1e-4]
paths = 100000
estimator = sbj
)";

const char* kEverything = R"(seed = 7
[ruin a]
distribution = lognormal{mu=0, sigma=1}
dependence = common_shock{law=beta, a=2, b=3, max=0.5}
intensity = piecewise{breaks=[0.5], levels=[2, 6]}
interest = 0.1
horizon = 2
premium = 3
premium_jumps = compound_poisson{rate=2, mean=5}
x_grid = [1, 10, 100]
paths = 5000
estimator = crude
seed = 99

[weighted-sums b]
distribution = pareto{alpha=1.5}
dependence = scale_mixture{atoms=[1, 2], probs=[0.25, 0.75]}
weights = uniform{n=5, lo=0.5, hi=2}
tail_scales = [0.01, 0.001]
paths = 20000

[weighted-sums c]
distribution = pareto{alpha=1.5}
weights = lattice{n=2, lo=0.5, hi=2, points=5}
tail_scales = [0.01]
estimator = conditional

[weighted-sums d]
distribution = pareto{alpha=1.5}
weights = kesten{eps=0.1, n_max=10}
tail_scales = [0.001]

[diagnose-dist e]
distribution = weibull{shape=0.5}
tail_scales = [1e-3, 1e-6]
quad_tol = 1e-10

[validate-assumptions f]
distribution = pareto{alpha=1.5}
dependence = common_shock{law=uniform, max=1}
x_grid = [100, 1000, 10000]

[poisson-check g]
intensity = sinusoidal{base=0.5, amplitude=0.25, period=6.283185307179586}
horizon = 6.283185307179586
n = 3
samples = 5000
conditional_samples = 1000
)";

std::vector<ConfigDiagnostic> diagnostics_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

bool has_message(const std::vector<ConfigDiagnostic>& ds, const std::string& needle) {
  for (const auto& d : ds)
    if (d.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Parse, ValidRuinSuite) {
  const auto s = parse_config(kRuin);
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.out_dir, "out");
  ASSERT_EQ(s.experiments.size(), 1u);
  const auto& e = s.experiments[0];
  EXPECT_EQ(e.name, "indep");
  EXPECT_EQ(e.type(), ExperimentType::Ruin);
  EXPECT_EQ(e.paths(), 100000u);
  const auto& r = std::get<RuinSpec>(e.spec);
  EXPECT_DOUBLE_EQ(r.interest, 0.05);
  EXPECT_DOUBLE_EQ(r.premium, 55.35);
  EXPECT_EQ(r.estimator, RuinEstimator::SingleBigJump);
  const auto xs = r.grid.resolve(r.distribution);
  ASSERT_EQ(xs.size(), 4u);
  EXPECT_NEAR(r.distribution.tail(xs[3]), 1e-4, 1e-16);
}

TEST(Parse, EveryTypeAndKey) {
  const auto s = parse_config(kEverything);
  ASSERT_EQ(s.experiments.size(), 7u);
  EXPECT_EQ(s.experiments[0].seed_override, 99u);
  EXPECT_EQ(s.experiment_seed(0), 99u);
  EXPECT_EQ(s.experiment_seed(1), derive_seed(7, 1));
  EXPECT_TRUE(std::get<RuinSpec>(s.experiments[0].spec).premium_jumps.has_value());
  EXPECT_TRUE(std::holds_alternative<WeightLattice>(std::get<WeightedSumsSpec>(s.experiments[2].spec).weights));
  EXPECT_TRUE(std::holds_alternative<KestenSweep>(std::get<WeightedSumsSpec>(s.experiments[3].spec).weights));
  EXPECT_EQ(s.experiments[4].paths(), 0u);
  EXPECT_EQ(s.experiments[6].type(), ExperimentType::PoissonCheck);
}

TEST(Parse, EmptySuite) {
  for (const std::string text : {"", "# nothing\n", "seed = 3\n"}) {
    const auto ds = diagnostics_of(text);
    ASSERT_EQ(ds.size(), 1u) << text;
    EXPECT_EQ(ds[0].message, "suite must contain ≥1 experiment");
  }
}

TEST(Parse, NegativeSinusoidalRate) {
  std::string text = kRuin;
  text.replace(text.find("amplitude=5"), 11, "amplitude=12");
  const auto ds = diagnostics_of(text);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].line, 8);
  EXPECT_TRUE(ds[0].message.find("nonnegative") != std::string::npos) << ds[0].message;
}

TEST(Parse, CollectsEveryErrorWithPosition) {
  const std::string text =
      "[ruin x]\n"                                // 1
      "distribution = pareto{alpha=-1}\n"         // 2
      "intensity = constant{rate=10}\n"           // 3
      "interest = 0\n"                            // 4
      "horizon = 1\n"                             // 5
      "tail_scales = [0.1, 0.5]\n"                // 6
      "paths = 10\n"                              // 7
      "colour = blue\n"                           // 8
      "[ruin x]\n"                                // 9
      "distribution = pareto{alpha=1.5}\n"        // 10
      "intensity = constant{rate=10}\n"           // 11
      "interest = 0.05\n"                         // 12
      "horizon = 1\n"                             // 13
      "horizon = 2\n"                             // 14
      "x_grid = [1, 2]\n"                         // 15
      "garbage line\n";                           // 16
  const auto ds = diagnostics_of(text);
  ASSERT_GE(ds.size(), 7u);
  for (std::size_t i = 1; i < ds.size(); ++i) {
    EXPECT_TRUE(ds[i - 1].line < ds[i].line || (ds[i - 1].line == ds[i].line && ds[i - 1].column <= ds[i].column));
  }
  auto at = [&](int line) {
    for (const auto& d : ds)
      if (d.line == line) return d;
    return ConfigDiagnostic{};
  };
  EXPECT_EQ(at(2).line, 2);
  EXPECT_GT(at(2).column, 15);
  EXPECT_TRUE(at(4).message.find("interest") != std::string::npos) << at(4).message;
  EXPECT_TRUE(at(6).message.find("decreasing") != std::string::npos) << at(6).message;
  EXPECT_TRUE(at(7).message.find(">= 1000") != std::string::npos) << at(7).message;
  EXPECT_TRUE(at(8).message.find("colour") != std::string::npos) << at(8).message;
  EXPECT_EQ(at(8).column, 1);
  EXPECT_TRUE(at(9).message.find("duplicate experiment name") != std::string::npos);
  EXPECT_EQ(at(9).column, 7);
  EXPECT_TRUE(at(14).message.find("duplicate key") != std::string::npos);
  EXPECT_TRUE(at(16).message.find("key = value") != std::string::npos);
  const ConfigError err(ds);
  EXPECT_TRUE(std::string(err.what()).find("line 7, column") != std::string::npos) << err.what();
}

TEST(Parse, SemanticChecks) {
  EXPECT_TRUE(has_message(diagnostics_of("[ruin a]\ndistribution = pareto{alpha=1.5}\nintensity = constant{rate=1}\n"
                                         "interest = 0.05\nhorizon = 1\nx_grid = [3, 2]\n"),
                          "increasing"));
  EXPECT_TRUE(has_message(diagnostics_of("[ruin a]\ndistribution = pareto{alpha=1.5}\nintensity = constant{rate=1}\n"
                                         "interest = 0.05\nhorizon = 1\n"),
                          "missing required key 'tail_scales'"));
  EXPECT_TRUE(has_message(diagnostics_of("[ruin a]\ndistribution = pareto{alpha=1.5}\nintensity = constant{rate=1}\n"
                                         "interest = 0.05\nhorizon = -1\nx_grid = [1]\npremium = -2\n"),
                          "must be >= 0"));
  EXPECT_TRUE(has_message(diagnostics_of("[weighted-sums a]\ndistribution = pareto{alpha=1.5}\n"
                                         "weights = lattice{n=6, lo=0.5, hi=2, points=5}\ntail_scales = [0.01]\n"),
                          "budget"));
  EXPECT_TRUE(has_message(diagnostics_of("[validate-assumptions a]\ndistribution = exponential{rate=1}\n"
                                         "x_grid = [100, 1000]\n"),
                          "long-tailed"));
  EXPECT_TRUE(has_message(diagnostics_of("[validate-assumptions a]\ndistribution = pareto{alpha=1.5}\n"
                                         "x_grid = [3, 1000]\n"),
                          "2 h(x)"));
  EXPECT_TRUE(has_message(diagnostics_of("[poisson-check a]\nintensity = constant{rate=0}\nhorizon = 1\n"),
                          "cumulative"));
  EXPECT_TRUE(has_message(diagnostics_of("[bogus a]\n"), "unknown experiment type"));
  EXPECT_TRUE(has_message(diagnostics_of("[ruin a b]\n"), "experiment name"));
  EXPECT_TRUE(has_message(diagnostics_of("colour = 1\n[diagnose-dist d]\ndistribution = pareto{alpha=1.5}\n"
                                         "tail_scales = [0.1]\n"),
                          "unknown global key"));
}

TEST(Parse, MissingFileIsConfigError) {
  EXPECT_THROW(parse_config_file("/nonexistent/suite.ini"), ConfigError);
}

TEST(Dump, RoundTripIsByteIdentical) {
  for (const char* text : {kRuin, kEverything}) {
    const std::string once = dump_config(parse_config(text));
    const std::string twice = dump_config(parse_config(once));
    EXPECT_EQ(once, twice);
    EXPECT_EQ(parse_config(once).experiments.size(), parse_config(text).experiments.size());
  }
  const std::string dumped = dump_config(parse_config(kRuin));
  EXPECT_NE(dumped.find("distribution = pareto{alpha=1.5, scale=1}"), std::string::npos) << dumped;
  EXPECT_NE(dumped.find("tail_scales = [0.1, 0.01, 0.001, 1e-04]"), std::string::npos) << dumped;
}

TEST(Seeds, AppendingExperimentsKeepsEarlierSeeds) {
  const auto one = parse_config(kRuin);
  std::string text = kRuin;
  text += "\n[diagnose-dist extra]\ndistribution = lognormal{mu=0, sigma=1}\ntail_scales = [0.01]\n";
  const auto two = parse_config(text);
  EXPECT_EQ(one.experiment_seed(0), two.experiment_seed(0));
  EXPECT_NE(two.experiment_seed(0), two.experiment_seed(1));
}

TEST(Experiment, PathsOverride) {
  auto s = parse_config(kRuin);
  s.experiments[0].set_paths(50000);
  EXPECT_EQ(s.experiments[0].paths(), 50000u);
  EXPECT_EQ(std::get<RuinSpec>(s.experiments[0].spec).paths, 50000u);
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}
