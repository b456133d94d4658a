#include "ruinlab/detail/overloaded.hpp"
#include "ruinlab/heavy_tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace ruinlab {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// log P(Z > z) for a standard normal Z.
double log_normal_upper(double z) {
  if (z < 0.0) return std::log1p(-0.5 * std::erfc(-z / std::numbers::sqrt2));
  if (z < 8.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Mills ratio by backward continued fraction; converged to double precision
  // for z >= 8 well before 60 terms.
  double t = z;
  for (int k = 60; k >= 1; --k) t = z + k / t;
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(t);
}

}  // namespace

TailDistribution TailDistribution::pareto(double alpha, double scale) {
  if (!positive_finite(alpha)) throw DomainError("pareto: alpha must be > 0");
  if (!positive_finite(scale)) throw DomainError("pareto: scale must be > 0");
  return TailDistribution(ParetoParams{alpha, scale});
}

TailDistribution TailDistribution::lognormal(double mu, double sigma) {
  if (!std::isfinite(mu)) throw DomainError("lognormal: mu must be finite");
  if (!positive_finite(sigma)) throw DomainError("lognormal: sigma must be > 0");
  return TailDistribution(LognormalParams{mu, sigma});
}

TailDistribution TailDistribution::weibull(double shape, double scale) {
  if (!positive_finite(shape)) throw DomainError("weibull: shape must be > 0");
  if (!positive_finite(scale)) throw DomainError("weibull: scale must be > 0");
  return TailDistribution(WeibullParams{shape, scale});
}

TailDistribution TailDistribution::exponential(double rate) {
  if (!positive_finite(rate)) throw DomainError("exponential: rate must be > 0");
  return TailDistribution(ExponentialParams{rate});
}

TailDistribution TailDistribution::from_term(const Term& t) {
  try {
    if (t.name == "pareto") {
      t.expect_keys({"alpha", "scale"});
      return pareto(t.number("alpha"), t.number_or("scale", 1.0));
    }
    if (t.name == "lognormal") {
      t.expect_keys({"mu", "sigma"});
      return lognormal(t.number_or("mu", 0.0), t.number("sigma"));
    }
    if (t.name == "weibull") {
      t.expect_keys({"shape", "scale"});
      return weibull(t.number("shape"), t.number_or("scale", 1.0));
    }
    if (t.name == "exponential") {
      t.expect_keys({"rate"});
      return exponential(t.number("rate"));
    }
  } catch (const TermError&) {
    throw;
  } catch (const DomainError& e) {
    throw TermError(e.what(), t.name_column);
  }
  throw TermError("unknown distribution family '" + t.name +
                      "' (expected pareto, lognormal, weibull or exponential)",
                  t.name_column);
}

TailDistribution TailDistribution::parse(std::string_view text) { return from_term(parse_term(text)); }

std::string TailDistribution::to_string() const {
  return std::visit(
      Overloaded{
          [](const ParetoParams& p) {
            return "pareto{alpha=" + format_number(p.alpha) + ", scale=" + format_number(p.scale) + "}";
          },
          [](const LognormalParams& p) {
            return "lognormal{mu=" + format_number(p.mu) + ", sigma=" + format_number(p.sigma) + "}";
          },
          [](const WeibullParams& p) {
            return "weibull{shape=" + format_number(p.shape) + ", scale=" + format_number(p.scale) + "}";
          },
          [](const ExponentialParams& p) { return "exponential{rate=" + format_number(p.rate) + "}"; },
      },
      params_);
}

Family TailDistribution::family() const noexcept {
  return static_cast<Family>(params_.index());
}

double TailDistribution::support_min() const noexcept {
  if (const auto* p = std::get_if<ParetoParams>(&params_)) return p->scale;
  return 0.0;
}

double TailDistribution::log_tail(double x) const {
  return std::visit(
      Overloaded{
          [x](const ParetoParams& p) { return x <= p.scale ? 0.0 : -p.alpha * std::log(x / p.scale); },
          [x](const LognormalParams& p) {
            if (x <= 0.0) return 0.0;
            return log_normal_upper((std::log(x) - p.mu) / p.sigma);
          },
          [x](const WeibullParams& p) { return x <= 0.0 ? 0.0 : -std::pow(x / p.scale, p.shape); },
          [x](const ExponentialParams& p) { return x <= 0.0 ? 0.0 : -p.rate * x; },
      },
      params_);
}

double TailDistribution::tail(double x) const {
  if (const auto* p = std::get_if<LognormalParams>(&params_)) {
    if (x <= 0.0) return 1.0;
    const double z = (std::log(x) - p->mu) / p->sigma;
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
  }
  return std::exp(log_tail(x));
}

double TailDistribution::cdf(double x) const {
  if (const auto* p = std::get_if<LognormalParams>(&params_)) {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - p->mu) / p->sigma;
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
  }
  return -std::expm1(log_tail(x));
}

double TailDistribution::density(double x) const {
  return std::visit(
      Overloaded{
          [x](const ParetoParams& p) {
            return x < p.scale ? 0.0 : p.alpha / p.scale * std::pow(x / p.scale, -p.alpha - 1.0);
          },
          [x](const LognormalParams& p) {
            if (x <= 0.0) return 0.0;
            const double z = (std::log(x) - p.mu) / p.sigma;
            return std::exp(-0.5 * z * z) / (p.sigma * x * std::sqrt(2.0 * std::numbers::pi));
          },
          [x](const WeibullParams& p) {
            if (x <= 0.0) return 0.0;
            const double u = x / p.scale;
            return p.shape / p.scale * std::pow(u, p.shape - 1.0) * std::exp(-std::pow(u, p.shape));
          },
          [x](const ExponentialParams& p) { return x < 0.0 ? 0.0 : p.rate * std::exp(-p.rate * x); },
      },
      params_);
}

double TailDistribution::inverse_tail(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("inverse_tail: probability must lie in (0, 1]");
  return std::visit(
      Overloaded{
          [p](const ParetoParams& d) { return d.scale * std::pow(p, -1.0 / d.alpha); },
          [p](const LognormalParams& d) {
            if (p == 1.0) return 0.0;
            const double z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
            return std::exp(d.mu + d.sigma * z);
          },
          [p](const WeibullParams& d) { return d.scale * std::pow(-std::log(p), 1.0 / d.shape); },
          [p](const ExponentialParams& d) { return -std::log(p) / d.rate; },
      },
      params_);
}

double TailDistribution::mean() const {
  return std::visit(
      Overloaded{
          [](const ParetoParams& p) {
            return p.alpha > 1.0 ? p.alpha * p.scale / (p.alpha - 1.0)
                                 : std::numeric_limits<double>::infinity();
          },
          [](const LognormalParams& p) { return std::exp(p.mu + 0.5 * p.sigma * p.sigma); },
          [](const WeibullParams& p) { return p.scale * std::tgamma(1.0 + 1.0 / p.shape); },
          [](const ExponentialParams& p) { return 1.0 / p.rate; },
      },
      params_);
}

bool TailDistribution::subexponential() const noexcept {
  switch (family()) {
    case Family::Pareto:
    case Family::Lognormal:
      return true;
    case Family::Weibull:
      return std::get<WeibullParams>(params_).shape < 1.0;
    case Family::Exponential:
      return false;
  }
  return false;
}

bool TailDistribution::long_tailed() const noexcept { return subexponential(); }

bool TailDistribution::dominated_variation() const noexcept { return family() == Family::Pareto; }

double InsensitivityFunction::operator()(double x) const {
  if (coefficient == 0.0) return 0.0;
  return coefficient * std::pow(x, exponent);
}

InsensitivityFunction default_insensitivity(const TailDistribution& d) {
  if (!d.long_tailed()) {
    throw DomainError("default_insensitivity: " + d.to_string() + " is not long-tailed, H(F) is empty");
  }
  if (const auto* w = std::get_if<WeibullParams>(&d.params())) {
    return InsensitivityFunction::power(std::min(0.5, 0.5 * (1.0 - w->shape)));
  }
  return InsensitivityFunction::power(0.5);
}

double log_sum_exp(std::span<const double> terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

double convolution_tail_ratio(const TailDistribution& d, double x, double quad_tol) {
  if (!(x > 0.0)) throw DomainError("convolution_tail_ratio: x must be > 0");
  if (!(quad_tol > 0.0)) throw DomainError("convolution_tail_ratio: quad_tol must be > 0");
  const double log_tx = d.log_tail(x);
  const double m = d.support_min();
  const double half = 0.5 * x;
  if (half <= m) {
    // Both summands are at least m > x/2, so the sum always exceeds x.
    return std::exp(-log_tx);
  }
  const double both_big = std::exp(2.0 * d.log_tail(half) - log_tx);
  // Scaled by 1/tail(x) so the integrand stays O(1) whatever the magnitude.
  const double one_big = integrate_against(
      d, m, half, [&](double y) { return std::exp(d.log_tail(x - y) - log_tx); }, quad_tol, quad_tol);
  return both_big + 2.0 * one_big;
}

double convolution_tail(const TailDistribution& d, double x, double quad_tol) {
  if (x <= 2.0 * d.support_min()) return 1.0;
  return convolution_tail_ratio(d, x, quad_tol) * d.tail(x);
}

std::vector<double> insensitivity_check(const TailDistribution& d, const InsensitivityFunction& h,
                                        std::span<const double> x_grid) {
  std::vector<double> out;
  out.reserve(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    if (!(x > 0.0)) throw DomainError("insensitivity_check: grid point " + format_number(x) + " is not > 0");
    if (i > 0 && !(x > x_grid[i - 1])) throw DomainError("insensitivity_check: grid must be increasing");
    const double hx = h(x);
    if (hx >= x) {
      throw DomainError("insensitivity_check: h(x) >= x at grid point x=" + format_number(x));
    }
    out.push_back(std::exp(d.log_tail(x - hx) - d.log_tail(x)));
  }
  return out;
}

}  // namespace ruinlab
