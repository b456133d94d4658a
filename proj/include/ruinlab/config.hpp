#pragma once

// Experiment suite configuration. The format is line oriented:
//
//   # comment
//   seed = 20240601
//   out_dir = results
//
//   [ruin independent_pareto]
//   distribution = pareto{alpha=1.5, scale=1}
//   dependence = independent
//   ...
//
// A section header names the experiment type and a unique experiment name.
// docs/config.md has the full grammar and the keys each type accepts.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ruinlab/dependence.hpp"
#include "ruinlab/heavy_tails.hpp"
#include "ruinlab/poisson_process.hpp"
#include "ruinlab/ruin_engine.hpp"
#include "ruinlab/weighted_sums.hpp"

namespace ruinlab {

enum class ExperimentType { Ruin, WeightedSums, DiagnoseDist, ValidateAssumptions, PoissonCheck };

std::string to_string(ExperimentType t);

/// Either raw x values or target tail scales s, mapped to x = tail^{-1}(s)
/// of the base distribution.
struct GridSpec {
  bool tail_scales = true;
  std::vector<double> values;

  std::vector<double> resolve(const TailDistribution& base) const;
  std::string key() const { return tail_scales ? "tail_scales" : "x_grid"; }
};

struct RuinSpec {
  TailDistribution distribution;
  DependenceModel dependence;
  IntensityModel intensity;
  double interest;
  double horizon;
  double premium = 0.0;
  std::optional<PremiumModel> premium_jumps;
  GridSpec grid;
  std::uint64_t paths = 100000;
  RuinEstimator estimator = RuinEstimator::SingleBigJump;

  RuinModel model() const;
};

/// Lattice of deterministic weights in [lo, hi]^n (uniformity sweep).
struct WeightLattice {
  std::size_t n = 2;
  double lo = 0.5;
  double hi = 2.0;
  std::size_t points = 5;
};

/// Unit weights, n = 1..n_max (Kesten-type bound probe).
struct KestenSweep {
  double eps = 0.1;
  std::size_t n_max = 10;
};

struct WeightedSumsSpec {
  TailDistribution distribution;
  DependenceModel dependence;
  std::variant<WeightSpec, WeightLattice, KestenSweep> weights;
  GridSpec grid;
  std::uint64_t paths = 100000;
  TailEstimator estimator = TailEstimator::Auto;
};

struct DiagnoseSpec {
  TailDistribution distribution;
  GridSpec grid;
  double quad_tol = 1e-9;
};

struct ValidateSpec {
  TailDistribution distribution;
  DependenceModel dependence;
  GridSpec grid;
};

struct PoissonCheckSpec {
  IntensityModel intensity;
  double horizon;
  std::size_t n = 3;
  std::uint64_t samples = 100000;
  std::uint64_t conditional_samples = 10000;
};

struct Experiment {
  std::string name;
  int line = 0;
  /// Explicit `seed =` inside the section; otherwise derived from the suite seed.
  std::optional<std::uint64_t> seed_override;
  std::variant<RuinSpec, WeightedSumsSpec, DiagnoseSpec, ValidateSpec, PoissonCheckSpec> spec;

  ExperimentType type() const;
  /// Paths (or samples) the experiment draws; 0 for deterministic experiments.
  std::uint64_t paths() const;
  void set_paths(std::uint64_t paths);
};

struct ExperimentSuite {
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  std::vector<Experiment> experiments;

  /// derive_seed(seed, index) unless the experiment sets its own.
  std::uint64_t experiment_seed(std::size_t index) const;
};

/// Parses and validates a whole suite. Throws ConfigError carrying every
/// diagnostic found, each with a line and column.
ExperimentSuite parse_config(std::string_view text);

/// Reads and parses a file; an unreadable file is reported as a ConfigError.
ExperimentSuite parse_config_file(const std::string& path);

/// Canonical text form; parse_config(dump_config(s)) dumps to the same bytes.
std::string dump_config(const ExperimentSuite& suite);

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace ruinlab
