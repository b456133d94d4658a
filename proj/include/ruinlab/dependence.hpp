#pragma once

// Conditionally independent claim constructions. The conditioning
// sigma-algebra is generated by one latent draw shared by every claim of a
// path; given the latent value the claims are i.i.d.
//
//   Independent          X_i = Z_i
//   CommonShock          X_i = Z_i + W,      W in [0, w_max]
//   ScaleMixture         X_i = Theta * Z_i,  Theta in [theta_min, theta_max]
//
// with Z_i i.i.d. from the base law. ScaleMixture only accepts a base with
// dominated variation (Pareto): for Weibull or Lognormal bases the envelope
// r(x) = tail(x / theta_max) / tail(x) grows too fast for the third
// conditional-tail condition to be checkable on a finite grid.
//
// In both constructions the event B_i(x) is the whole space, so the
// condition on P(complement of B_i) holds trivially.

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ruinlab/heavy_tails.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

/// Law of the common shock W, supported on [0, max].
struct ShockLaw {
  enum class Kind { Uniform, Point, Beta };
  Kind kind = Kind::Uniform;
  double max = 1.0;
  double a = 1.0;  // Beta shape parameters (scaled to [0, max])
  double b = 1.0;

  double quantile(double u) const;
  double cdf(double w) const;
  double mean() const;
};

struct IndependentClaims {};
struct CommonShock {
  ShockLaw law;
};
struct ScaleMixture {
  std::vector<double> atoms;
  std::vector<double> probs;
};

/// Realized latent draw; the meaning of `value` depends on the model kind
/// (0 for Independent, W for CommonShock, Theta for ScaleMixture).
struct Latent {
  double value = 0.0;
};

class DependenceModel {
 public:
  using Kind = std::variant<IndependentClaims, CommonShock, ScaleMixture>;

  DependenceModel(TailDistribution base, Kind kind);

  static DependenceModel independent(TailDistribution base);
  static DependenceModel common_shock(TailDistribution base, ShockLaw law);
  static DependenceModel scale_mixture(TailDistribution base, std::vector<double> atoms,
                                       std::vector<double> probs);

  /// `independent`, `common_shock{law=uniform, max=1}` (laws: uniform, point,
  /// beta with a=, b=), `scale_mixture{atoms=[1, 2], probs=[0.5, 0.5]}`.
  static DependenceModel from_term(const Term& term, TailDistribution base);
  static DependenceModel parse(std::string_view text, TailDistribution base);
  std::string to_string() const;

  const TailDistribution& base() const noexcept { return base_; }
  const Kind& kind() const noexcept { return kind_; }

  Latent sample_latent(Rng& rng) const;
  double sample_claim(Latent latent, Rng& rng) const;
  void sample_claims(Latent latent, std::span<double> out, Rng& rng) const;
  std::vector<double> sample_claims(Latent latent, std::size_t n, Rng& rng) const;

  /// P(X > x | latent).
  double conditional_tail(Latent latent, double x) const;
  double log_conditional_tail(Latent latent, double x) const;

  /// P(X > x), the latent integrated out exactly (quadrature for continuous
  /// shock laws).
  double marginal_tail(double x) const;
  double log_marginal_tail(double x) const;

  /// Smallest r(x) with P(X > x | latent) <= r(x) * base.tail(x) for every
  /// latent value, in closed form.
  double r_envelope(double x) const;

  /// Left end of the marginal claim support.
  double marginal_support_min() const;
  /// Arguments where the marginal tail may have a derivative jump.
  std::vector<double> marginal_kinks() const;

 private:
  TailDistribution base_;
  Kind kind_;
};

/// Numerical probe of the conditional-tail assumption on a grid.
struct AssumptionProbe {
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> r;              // closed-form envelope
  std::vector<double> r_majorant;     // running max of r: nondecreasing, dominates r
  std::vector<double> d3_ii;          // r(x) * tail(h(x))
  std::vector<double> d3_iii;         // r(x) * int_{h}^{x-h} tail(x-y) dF(y) / tail(x)
  std::vector<double> marginal_ratio; // marginal_tail(x) / tail(x)
  std::string b_event = "whole space";

  bool r_nondecreasing() const;
  bool r_nonincreasing() const;
};

/// Throws DomainError when the grid has fewer than two points, is not
/// increasing, or some point does not exceed 2 h(x).
AssumptionProbe probe_assumption_d3(const DependenceModel& dm, const InsensitivityFunction& h,
                                    std::span<const double> x_grid);

}  // namespace ruinlab
