#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruinlab/config.hpp"
#include "ruinlab/report.hpp"

namespace ruinlab {

struct ExperimentResult {
  Table table;
  std::optional<Plot> plot;
  /// Diagnostic notes (estimator fallbacks, degenerate estimates).
  std::vector<std::string> notes;
};

/// Runs one experiment with the given seed. Deterministic in (experiment, seed).
ExperimentResult execute_experiment(const Experiment& e, std::uint64_t seed, std::size_t workers = 0);

struct PoissonCheckReport {
  double cumulative = 0.0;  // Lambda(T)
  double count_mean = 0.0;
  double count_variance = 0.0;
  double chi2_statistic = 0.0;
  int chi2_dof = 0;
  double chi2_p_value = 0.0;
  double ks_first_epoch = 0.0;       // thinning vs Poisson count + conditional sampler
  double ks_last_epoch = 0.0;
  double ks_conditional = 0.0;       // pooled epochs given N(T) = n
  double ks_conditional_order = 0.0; // worst single order statistic given N(T) = n
  std::uint64_t thinning_runs = 0;
  std::uint64_t conditional_runs = 0;
};

PoissonCheckReport run_poisson_check(const PoissonCheckSpec& spec, std::uint64_t seed);

struct RunOptions {
  std::string out_dir;                     // overrides the suite's out_dir when nonempty
  bool plots = false;
  bool parallel = false;
  std::optional<std::uint64_t> paths;      // --paths override
  std::optional<std::uint64_t> seed;       // --seed override of the master seed
  std::size_t workers = 0;
};

struct ExperimentOutcome {
  std::string name;
  ExperimentType type{};
  std::uint64_t seed = 0;
  std::optional<std::string> csv;
  std::optional<std::string> plot;
  bool ok = false;
  std::string error;
  double wall_seconds = 0.0;
};

struct SuiteOutcome {
  std::vector<ExperimentOutcome> experiments;
  bool ok = false;
  std::string manifest_path;
};

/// Runs every experiment, writing <name>.csv (and <name>.svg with plots) plus
/// manifest.json into the output directory. A failing experiment does not
/// stop the others; it is marked failed in the manifest.
SuiteOutcome run_suite(ExperimentSuite suite, const RunOptions& opts);

std::string version_string();

}  // namespace ruinlab
