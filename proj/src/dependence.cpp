#include "ruinlab/detail/overloaded.hpp"
#include "ruinlab/dependence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "ruinlab/quadrature.hpp"

namespace ruinlab {

namespace {

void validate(const TailDistribution& base, const DependenceModel::Kind& kind) {
  if (const auto* cs = std::get_if<CommonShock>(&kind)) {
    if (!(std::isfinite(cs->law.max) && cs->law.max >= 0.0)) {
      throw DomainError("common_shock: max must be finite and >= 0");
    }
    if (cs->law.kind != ShockLaw::Kind::Point && !(cs->law.max > 0.0)) {
      throw DomainError("common_shock: continuous shock laws need max > 0");
    }
    if (cs->law.kind == ShockLaw::Kind::Beta && !(cs->law.a > 0.0 && cs->law.b > 0.0)) {
      throw DomainError("common_shock: beta law needs a > 0 and b > 0");
    }
  }
  if (const auto* sm = std::get_if<ScaleMixture>(&kind)) {
    if (sm->atoms.empty() || sm->atoms.size() != sm->probs.size()) {
      throw DomainError("scale_mixture: atoms and probs must be nonempty and of equal length");
    }
    for (double a : sm->atoms) {
      if (!(std::isfinite(a) && a > 0.0)) throw DomainError("scale_mixture: atoms must be finite and > 0");
    }
    double total = 0.0;
    for (double p : sm->probs) {
      if (!(p >= 0.0)) throw DomainError("scale_mixture: probs must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("scale_mixture: probs must sum to 1");
    if (!base.dominated_variation()) {
      throw DomainError("scale_mixture: base law must have dominated variation (pareto), got " +
                        base.to_string());
    }
  }
}

}  // namespace

double ShockLaw::quantile(double u) const {
  switch (kind) {
    case Kind::Uniform:
      return u * max;
    case Kind::Point:
      return max;
    case Kind::Beta:
      return max * boost::math::ibeta_inv(a, b, u);
  }
  return max;
}

double ShockLaw::cdf(double w) const {
  if (w < 0.0) return 0.0;
  if (w >= max) return 1.0;
  switch (kind) {
    case Kind::Uniform:
      return w / max;
    case Kind::Point:
      return 0.0;
    case Kind::Beta:
      return boost::math::ibeta(a, b, w / max);
  }
  return 1.0;
}

double ShockLaw::mean() const {
  switch (kind) {
    case Kind::Uniform:
      return 0.5 * max;
    case Kind::Point:
      return max;
    case Kind::Beta:
      return max * a / (a + b);
  }
  return max;
}

DependenceModel::DependenceModel(TailDistribution base, Kind kind) : base_(base), kind_(std::move(kind)) {
  validate(base_, kind_);
}

DependenceModel DependenceModel::independent(TailDistribution base) {
  return DependenceModel(base, IndependentClaims{});
}

DependenceModel DependenceModel::common_shock(TailDistribution base, ShockLaw law) {
  return DependenceModel(base, CommonShock{law});
}

DependenceModel DependenceModel::scale_mixture(TailDistribution base, std::vector<double> atoms,
                                               std::vector<double> probs) {
  return DependenceModel(base, ScaleMixture{std::move(atoms), std::move(probs)});
}

DependenceModel DependenceModel::from_term(const Term& t, TailDistribution base) {
  try {
    if (t.name == "independent") {
      t.expect_keys({});
      return independent(base);
    }
    if (t.name == "common_shock") {
      t.expect_keys({"law", "max", "a", "b"});
      ShockLaw law;
      const std::string kind = t.ident_or("law", "uniform");
      if (kind == "uniform") {
        law.kind = ShockLaw::Kind::Uniform;
      } else if (kind == "point") {
        law.kind = ShockLaw::Kind::Point;
      } else if (kind == "beta") {
        law.kind = ShockLaw::Kind::Beta;
        law.a = t.number("a");
        law.b = t.number("b");
      } else {
        throw TermError("common_shock: unknown law '" + kind + "' (expected uniform, point or beta)",
                        t.name_column);
      }
      if (law.kind != ShockLaw::Kind::Beta && (t.has("a") || t.has("b"))) {
        throw TermError("common_shock: a and b only apply to law=beta", t.name_column);
      }
      law.max = t.number_or("max", 1.0);
      return common_shock(base, law);
    }
    if (t.name == "scale_mixture") {
      t.expect_keys({"atoms", "probs"});
      return scale_mixture(base, t.list("atoms"), t.list("probs"));
    }
  } catch (const TermError&) {
    throw;
  } catch (const DomainError& e) {
    throw TermError(e.what(), t.name_column);
  }
  throw TermError("unknown dependence model '" + t.name +
                      "' (expected independent, common_shock or scale_mixture)",
                  t.name_column);
}

DependenceModel DependenceModel::parse(std::string_view text, TailDistribution base) {
  return from_term(parse_term(text), base);
}

std::string DependenceModel::to_string() const {
  return std::visit(Overloaded{
                        [](const IndependentClaims&) { return std::string("independent"); },
                        [](const CommonShock& c) {
                          switch (c.law.kind) {
                            case ShockLaw::Kind::Uniform:
                              return "common_shock{law=uniform, max=" + format_number(c.law.max) + "}";
                            case ShockLaw::Kind::Point:
                              return "common_shock{law=point, max=" + format_number(c.law.max) + "}";
                            case ShockLaw::Kind::Beta:
                              break;
                          }
                          return "common_shock{law=beta, a=" + format_number(c.law.a) +
                                 ", b=" + format_number(c.law.b) + ", max=" + format_number(c.law.max) +
                                 "}";
                        },
                        [](const ScaleMixture& s) {
                          return "scale_mixture{atoms=" + format_list(s.atoms) +
                                 ", probs=" + format_list(s.probs) + "}";
                        },
                    },
                    kind_);
}

Latent DependenceModel::sample_latent(Rng& rng) const {
  return std::visit(Overloaded{
                        [](const IndependentClaims&) { return Latent{}; },
                        [&](const CommonShock& c) {
                          if (c.law.kind == ShockLaw::Kind::Point) return Latent{c.law.max};
                          return Latent{c.law.quantile(rng.uniform())};
                        },
                        [&](const ScaleMixture& s) {
                          const double u = rng.uniform();
                          double acc = 0.0;
                          for (std::size_t i = 0; i + 1 < s.atoms.size(); ++i) {
                            acc += s.probs[i];
                            if (u < acc) return Latent{s.atoms[i]};
                          }
                          return Latent{s.atoms.back()};
                        },
                    },
                    kind_);
}

double DependenceModel::sample_claim(Latent latent, Rng& rng) const {
  const double z = base_.sample(rng);
  switch (kind_.index()) {
    case 1:
      return z + latent.value;
    case 2:
      return z * latent.value;
    default:
      return z;
  }
}

void DependenceModel::sample_claims(Latent latent, std::span<double> out, Rng& rng) const {
  for (double& x : out) x = sample_claim(latent, rng);
}

std::vector<double> DependenceModel::sample_claims(Latent latent, std::size_t n, Rng& rng) const {
  std::vector<double> out(n);
  sample_claims(latent, out, rng);
  return out;
}

double DependenceModel::log_conditional_tail(Latent latent, double x) const {
  switch (kind_.index()) {
    case 1:
      return base_.log_tail(x - latent.value);
    case 2:
      return base_.log_tail(x / latent.value);
    default:
      return base_.log_tail(x);
  }
}

double DependenceModel::conditional_tail(Latent latent, double x) const {
  switch (kind_.index()) {
    case 1:
      return base_.tail(x - latent.value);
    case 2:
      return base_.tail(x / latent.value);
    default:
      return base_.tail(x);
  }
}

double DependenceModel::log_marginal_tail(double x) const {
  return std::visit(
      Overloaded{
          [&](const IndependentClaims&) { return base_.log_tail(x); },
          [&](const CommonShock& c) {
            const ShockLaw& law = c.law;
            if (law.kind == ShockLaw::Kind::Point) return base_.log_tail(x - law.max);
            // Largest integrand value is at W = max; scale by it.
            const double ref = base_.log_tail(x - law.max);
            auto integrand = [&](double u) { return std::exp(base_.log_tail(x - law.quantile(u)) - ref); };
            const double kink = law.cdf(x - base_.support_min());
            const std::array<double, 1> bps{kink};
            const auto pts = ruinlab::partition(0.0, 1.0, bps);
            QuadratureOptions opts;
            opts.rel_tol = 1e-12;
            opts.max_intervals = 20000;
            const double v = integrate(integrand, std::span<const double>(pts), opts).value;
            return ref + std::log(v);
          },
          [&](const ScaleMixture& s) {
            std::vector<double> terms(s.atoms.size());
            for (std::size_t i = 0; i < s.atoms.size(); ++i) {
              terms[i] = std::log(s.probs[i]) + base_.log_tail(x / s.atoms[i]);
            }
            return log_sum_exp(terms);
          },
      },
      kind_);
}

double DependenceModel::marginal_tail(double x) const {
  if (kind_.index() == 0) return base_.tail(x);
  return std::min(1.0, std::exp(log_marginal_tail(x)));
}

double DependenceModel::r_envelope(double x) const {
  return std::visit(Overloaded{
                        [](const IndependentClaims&) { return 1.0; },
                        [&](const CommonShock& c) {
                          return std::exp(base_.log_tail(x - c.law.max) - base_.log_tail(x));
                        },
                        [&](const ScaleMixture& s) {
                          const double top = *std::max_element(s.atoms.begin(), s.atoms.end());
                          return std::exp(base_.log_tail(x / top) - base_.log_tail(x));
                        },
                    },
                    kind_);
}

double DependenceModel::marginal_support_min() const {
  return std::visit(Overloaded{
                        [&](const IndependentClaims&) { return base_.support_min(); },
                        [&](const CommonShock& c) {
                          return base_.support_min() + (c.law.kind == ShockLaw::Kind::Point ? c.law.max : 0.0);
                        },
                        [&](const ScaleMixture& s) {
                          return base_.support_min() * *std::min_element(s.atoms.begin(), s.atoms.end());
                        },
                    },
                    kind_);
}

std::vector<double> DependenceModel::marginal_kinks() const {
  const double m = base_.support_min();
  return std::visit(Overloaded{
                        [&](const IndependentClaims&) { return std::vector<double>{m}; },
                        [&](const CommonShock& c) { return std::vector<double>{m, m + c.law.max}; },
                        [&](const ScaleMixture& s) {
                          std::vector<double> out;
                          for (double a : s.atoms) out.push_back(m * a);
                          return out;
                        },
                    },
                    kind_);
}

// Envelopes come from differences of log tails, so allow last-bit jitter.
bool AssumptionProbe::r_nondecreasing() const {
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] < r[i - 1] * (1.0 - 1e-12)) return false;
  return true;
}

bool AssumptionProbe::r_nonincreasing() const {
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] > r[i - 1] * (1.0 + 1e-12)) return false;
  return true;
}

AssumptionProbe probe_assumption_d3(const DependenceModel& dm, const InsensitivityFunction& h,
                                    std::span<const double> x_grid) {
  if (x_grid.size() < 2) throw DomainError("probe_assumption_d3: grid needs at least two points");
  const TailDistribution& base = dm.base();
  AssumptionProbe probe;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    if (i > 0 && !(x > x_grid[i - 1])) throw DomainError("probe_assumption_d3: grid must be increasing");
    const double hx = h(x);
    if (!(x > 2.0 * hx)) {
      throw DomainError("probe_assumption_d3: grid point x=" + format_number(x) + " does not exceed 2 h(x)");
    }
    const double log_tx = base.log_tail(x);
    const double r = dm.r_envelope(x);
    const double middle = integrate_against(
        base, hx, x - hx, [&](double y) { return std::exp(base.log_tail(x - y) - log_tx); }, 1e-13, 1e-10);
    probe.x.push_back(x);
    probe.h.push_back(hx);
    probe.r.push_back(r);
    probe.r_majorant.push_back(probe.r_majorant.empty() ? r : std::max(r, probe.r_majorant.back()));
    probe.d3_ii.push_back(r * base.tail(hx));
    probe.d3_iii.push_back(r * middle);
    probe.marginal_ratio.push_back(std::exp(dm.log_marginal_tail(x) - log_tx));
  }
  return probe;
}

}  // namespace ruinlab
