#pragma once

// Monte Carlo estimates of the tail of randomly weighted sums of
// conditionally independent claims:
//
//   P(sum theta_i X_i > x),  P(max theta_i X_i > x),  sum_i P(theta_i X_i > x)
//
// All three are computed on common random numbers, so pathwise orderings
// (max <= sum, Bonferroni bounds) hold exactly, not just in expectation.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ruinlab/dependence.hpp"
#include "ruinlab/estimate.hpp"

namespace ruinlab {

/// Weights independent of the claims with P(0 < theta_i <= bound) = 1.
class WeightSpec {
 public:
  enum class Kind { Deterministic, RandomUniform };

  /// Fixed weights, each in (0, inf).
  static WeightSpec deterministic(std::vector<double> weights);
  /// n i.i.d. weights uniform on (lo, hi], 0 <= lo < hi.
  static WeightSpec random_uniform(std::size_t n, double lo, double hi);

  /// `deterministic{c=[1, 1]}` or `uniform{n=5, lo=0.5, hi=2}`.
  static WeightSpec from_term(const Term& term);
  static WeightSpec parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return n_; }
  double bound() const noexcept;
  const std::vector<double>& values() const noexcept { return values_; }

  /// Writes size() weights; consumes no randomness for deterministic weights.
  void sample(Rng& rng, std::span<double> out) const;

 private:
  Kind kind_ = Kind::Deterministic;
  std::size_t n_ = 0;
  std::vector<double> values_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

enum class TailEstimator {
  Crude,        // indicator averages
  Conditional,  // each summand integrated out given the others
  Auto,         // Conditional when base.tail(x) < kRareEventScale, else Crude
};

inline constexpr double kRareEventScale = 1e-5;

std::string to_string(TailEstimator e);
TailEstimator parse_tail_estimator(std::string_view text);

struct McOptions {
  std::uint64_t paths = 100000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0 = worker_count()
};

struct TailTriple {
  double x = 0.0;
  EstimateWithCI p_sum;
  EstimateWithCI p_max;
  EstimateWithCI sum_marginals;
  /// Estimate of sum over i < j of P(theta_i X_i > x, theta_j X_j > x).
  EstimateWithCI pair_exceedances;
  TailEstimator estimator = TailEstimator::Crude;
  /// Paths whose max contribution exceeded their sum contribution (must be 0).
  std::uint64_t domination_violations = 0;
  /// No path contributed to any of the three statistics.
  bool degenerate = false;

  double ratio_sum() const noexcept { return p_sum.point / sum_marginals.point; }
  double ratio_max() const noexcept { return p_max.point / sum_marginals.point; }
};

/// One pass of `paths` simulations evaluated at every x (common random numbers
/// across x). Requires paths >= 1000.
std::vector<TailTriple> estimate_tail_triples(const DependenceModel& dm, const WeightSpec& w,
                                              std::span<const double> xs, const McOptions& opts,
                                              TailEstimator estimator = TailEstimator::Auto);

TailTriple estimate_tail_triple(const DependenceModel& dm, const WeightSpec& w, double x,
                                const McOptions& opts, TailEstimator estimator = TailEstimator::Auto);

/// Upper limit on n * grid_per_dim^n for uniformity_sweep.
inline constexpr std::size_t kSweepBudget = 4096;

struct SweepResult {
  std::vector<std::vector<double>> lattice;  // weight vectors, lexicographic order
  std::vector<TailTriple> triples;           // one per lattice point
  double min_ratio = 0.0;                    // min of p_sum / sum_marginals
  double max_ratio = 0.0;

  double worst_deviation() const noexcept;
};

/// Evaluates p_sum / sum_marginals over the lattice of weight vectors in
/// [lo, hi]^n with grid_per_dim points per axis, all on common random
/// numbers (the same claims for every lattice point).
SweepResult uniformity_sweep(const DependenceModel& dm, double lo, double hi, std::size_t n,
                             std::size_t grid_per_dim, double x, const McOptions& opts,
                             TailEstimator estimator = TailEstimator::Auto);

struct KestenPoint {
  std::size_t n = 0;
  EstimateWithCI p_sum;  // P(X_1 + ... + X_n > x)
  double bound_ratio = 0.0;  // p_sum / ((1 + eps)^n * marginal_tail(x))
};

struct KestenProbe {
  double x = 0.0;
  double eps = 0.0;
  double reference_tail = 0.0;
  std::vector<KestenPoint> points;
  /// Smallest V with p_sum <= V (1 + eps)^n tail(x) for every probed n.
  double fitted_v = 0.0;
};

/// Estimates P(S_n > x) for n = 1..n_max on common random numbers and
/// reports each against (1 + eps)^n tail(x).
KestenProbe kesten_bound_probe(const DependenceModel& dm, double eps, std::size_t n_max, double x,
                               const McOptions& opts);

}  // namespace ruinlab
