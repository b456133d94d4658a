#pragma once

// Finite-horizon ruin of the compound nonhomogeneous Poisson model with
// constant interest force r:
//
//   S(t) = x e^{rt} + int_0^t e^{r(t-s)} dC(s) - sum_{k <= N(t)} X_k e^{r(t - sigma_k)}
//
// Discounting by e^{-rt}, ruin before T happens iff at some claim epoch
// sigma_k <= T the discounted claim total D_k = sum_{j<=k} X_j e^{-r sigma_j}
// exceeds x + P(sigma_k), with P(s) = int_0^s e^{-ru} dC(u). Between claims
// the discounted surplus only grows, so checking claim epochs is exact.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ruinlab/dependence.hpp"
#include "ruinlab/estimate.hpp"
#include "ruinlab/poisson_process.hpp"
#include "ruinlab/weighted_sums.hpp"

namespace ruinlab {

/// Premium income: deterministic rate c plus optional compound Poisson jumps
/// (exponential sizes) arriving independently of claims.
struct PremiumModel {
  double rate = 0.0;
  double jump_rate = 0.0;
  double jump_mean = 0.0;

  bool has_jumps() const noexcept { return jump_rate > 0.0; }
  /// `compound_poisson{rate=2, mean=5}` for the jump part.
  static PremiumModel parse_jumps(std::string_view text, double rate);
  std::string jumps_to_string() const;
};

struct RuinModel {
  DependenceModel claims;
  IntensityModel intensity;
  double interest = 0.05;
  double horizon = 1.0;
  PremiumModel premium;

  /// Throws DomainError unless r > 0, T > 0, c >= 0 and jump parameters are sane.
  void validate() const;
  /// Present value of deterministic premiums received over [0, s].
  double premium_pv(double s) const;
};

enum class RuinEstimator { Crude, SingleBigJump };

std::string to_string(RuinEstimator e);
RuinEstimator parse_ruin_estimator(std::string_view text);

/// One simulated path. Arrays are indexed by claim.
struct PathRecord {
  Latent latent;
  std::vector<double> epochs;        // sigma_k
  std::vector<double> claims;        // X_k
  std::vector<double> discounted;    // X_k e^{-r sigma_k}
  std::vector<double> cumulative;    // D_k
  std::vector<double> premium;       // P(sigma_k), including premium jumps before sigma_k
  std::vector<double> jump_epochs;   // premium jump times
  std::vector<double> jump_sizes;
  double premium_total = 0.0;        // P(T)

  std::size_t count() const noexcept { return epochs.size(); }
  /// max_k (D_k - P(sigma_k)); -inf without claims. Ruin at x iff this > x.
  double max_deficit() const;
  bool ruined(double x) const { return max_deficit() > x; }
  /// D_N, the discounted claim total over [0, T].
  double discounted_total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Path `index` of the stream identified by `seed`. Arrivals, claims and
/// premium jumps use separate generators derived from (seed, index), so a
/// path simulated with a shorter horizon is the prefix of the longer one.
PathRecord simulate_path(const RuinModel& model, std::uint64_t seed, std::uint64_t index);

/// Per-path single-big-jump estimate of P(ruin | latent, arrivals) at x:
/// the sum over claims K of P(ruin and claim K is the largest discounted claim),
/// each with claim K integrated out in closed form.
double single_big_jump_term(const RuinModel& model, const PathRecord& path, double x);

struct RuinEstimate {
  double x = 0.0;
  EstimateWithCI psi_hat;
  double asymptotic = 0.0;      // int_0^T marginal_tail(x e^{ru}) lambda(u) du
  double asymptotic_raw = 0.0;  // same with the base tail
  double ratio = 0.0;           // psi_hat.point / asymptotic
  RuinEstimator estimator = RuinEstimator::Crude;
  bool fell_back = false;       // SBJ requested but crude used after the pilot
};

struct RuinRunOptions {
  std::uint64_t paths = 100000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

/// Crude estimates at every x on common random numbers: the same paths are
/// re-thresholded, so estimates are nonincreasing in x path by path.
std::vector<EstimateWithCI> estimate_ruin_crude(const RuinModel& model, std::span<const double> xs,
                                                const RuinRunOptions& opts);
EstimateWithCI estimate_ruin_crude(const RuinModel& model, double x, const RuinRunOptions& opts);

struct SbjOutcome {
  EstimateWithCI estimate;
  bool fell_back = false;
};

/// Single-big-jump estimates at every x. A pilot over the first paths
/// compares the estimator's variance with the binomial variance p(1-p) a
/// crude estimator would have; where it is larger the crude estimate is
/// returned instead and fell_back is set.
std::vector<SbjOutcome> estimate_ruin_sbj(const RuinModel& model, std::span<const double> xs,
                                          const RuinRunOptions& opts);
EstimateWithCI estimate_ruin_sbj(const RuinModel& model, double x, const RuinRunOptions& opts);

/// Number of leading paths used by the SBJ pilot.
std::uint64_t sbj_pilot_paths(std::uint64_t paths);

/// log of int_0^T tail(x e^{ru}) lambda(u) du, with tail the marginal tail of
/// `dm` (use_marginal) or its base tail. Relative quadrature tolerance 1e-9.
double log_asymptotic_integral(const DependenceModel& dm, const IntensityModel& im, double r, double T,
                               double x, bool use_marginal = true);
double asymptotic_integral(const DependenceModel& dm, const IntensityModel& im, double r, double T, double x,
                           bool use_marginal = true);

struct RuinExperimentConfig {
  RuinModel model;
  std::vector<double> x_grid;
  std::uint64_t paths = 100000;
  RuinEstimator estimator = RuinEstimator::SingleBigJump;
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  /// Throws DomainError on r <= 0, T <= 0, a non-increasing grid or paths < 1000.
  void validate() const;
};

/// Estimate, asymptotic integral and ratio for every x in the grid.
std::vector<RuinEstimate> run_ruin_experiment(const RuinExperimentConfig& cfg);

}  // namespace ruinlab
