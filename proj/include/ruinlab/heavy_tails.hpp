#pragma once

// Claim-size laws with exact tails, inverse-transform samplers and the
// numerical diagnostics used to check class membership (S, L, D) and
// insensitivity functions.
//
// Pareto is parameterized on support [scale, inf) with tail (x/scale)^-alpha.
// Weibull has tail exp(-(x/scale)^shape); only 0 < shape < 1 is heavy-tailed.

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ruinlab/rng.hpp"
#include "ruinlab/term.hpp"

namespace ruinlab {

enum class Family { Pareto, Lognormal, Weibull, Exponential };

struct ParetoParams {
  double alpha;
  double scale;
};
struct LognormalParams {
  double mu;
  double sigma;
};
struct WeibullParams {
  double shape;
  double scale;
};
struct ExponentialParams {
  double rate;
};

class TailDistribution {
 public:
  using Params = std::variant<ParetoParams, LognormalParams, WeibullParams, ExponentialParams>;

  static TailDistribution pareto(double alpha, double scale = 1.0);
  static TailDistribution lognormal(double mu, double sigma);
  static TailDistribution weibull(double shape, double scale = 1.0);
  static TailDistribution exponential(double rate);

  /// Parses `pareto{alpha=1.5, scale=1}`, `lognormal{mu=0, sigma=1}`,
  /// `weibull{shape=0.5, scale=1}` or `exponential{rate=1}`.
  static TailDistribution from_term(const Term& term);
  static TailDistribution parse(std::string_view text);
  std::string to_string() const;

  Family family() const noexcept;
  const Params& params() const noexcept { return params_; }

  /// Left end of the support (scale for Pareto, 0 otherwise).
  double support_min() const noexcept;

  /// Right tail P(X > x). Defined for every real x; equals 1 below the support.
  double tail(double x) const;
  /// log P(X > x), finite far beyond the point where tail() underflows.
  double log_tail(double x) const;
  double cdf(double x) const;
  double density(double x) const;
  /// The x with tail(x) == p, for p in (0, 1]. Returns support_min() at p == 1.
  double inverse_tail(double p) const;
  /// The x with cdf(x) == u, for u in [0, 1).
  double quantile(double u) const { return inverse_tail(1.0 - u); }
  /// Inverse-transform draw.
  double sample(Rng& rng) const { return inverse_tail(rng.uniform()); }
  /// Expected value; +inf when it does not exist.
  double mean() const;

  bool subexponential() const noexcept;
  bool long_tailed() const noexcept;
  bool dominated_variation() const noexcept;

 private:
  explicit TailDistribution(Params p) : params_(p) {}
  Params params_;
};

/// h(x) = coefficient * x^exponent, the per-family member of H(F). The zero
/// function (coefficient 0) is allowed as the identity case of the check.
struct InsensitivityFunction {
  double coefficient = 1.0;
  double exponent = 0.5;

  double operator()(double x) const;
  static InsensitivityFunction zero() { return {0.0, 0.0}; }
  static InsensitivityFunction power(double exponent, double coefficient = 1.0) {
    return {coefficient, exponent};
  }
};

/// sqrt(x) for Pareto and Lognormal; x^min(1/2, (1-shape)/2) for Weibull.
/// Throws DomainError for families that are not long-tailed.
InsensitivityFunction default_insensitivity(const TailDistribution& d);

/// log( sum exp(a_i) ) without overflow.
double log_sum_exp(std::span<const double> terms);

/// Integral of g(y) dF(y) over (lo, hi], evaluated in tail space
/// (v = tail(y)) so the measure has no density singularities.
template <class G>
double integrate_against(const TailDistribution& d, double lo, double hi, G&& g, double abs_tol,
                         double rel_tol = 1e-9);

/// P(X1 + X2 > x) for two independent draws, via the split at x/2:
/// tail(x/2)^2 + 2 * integral over (support_min, x/2] of tail(x - y) dF(y).
double convolution_tail(const TailDistribution& d, double x, double quad_tol = 1e-9);

/// convolution_tail(x) / tail(x); tends to 2 for subexponential laws.
double convolution_tail_ratio(const TailDistribution& d, double x, double quad_tol = 1e-9);

/// tail(x - h(x)) / tail(x) at each grid point. Grid must be increasing with
/// h(x) < x everywhere.
std::vector<double> insensitivity_check(const TailDistribution& d, const InsensitivityFunction& h,
                                        std::span<const double> x_grid);

}  // namespace ruinlab

#include "ruinlab/detail/heavy_tails_impl.hpp"
