#include "ruinlab/detail/overloaded.hpp"
#include "ruinlab/poisson_process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

double supremum(const IntensityModel::Kind& k) {
  return std::visit(Overloaded{
                        [](const ConstantIntensity& c) { return c.rate; },
                        [](const SinusoidalIntensity& s) { return s.base + s.amplitude; },
                        [](const PiecewiseIntensity& p) {
                          return *std::max_element(p.levels.begin(), p.levels.end());
                        },
                    },
                    k);
}

}  // namespace

IntensityModel::IntensityModel(Kind k) : kind_(std::move(k)), bound_(supremum(kind_)) {}

IntensityModel IntensityModel::constant(double rate) {
  if (!(std::isfinite(rate) && rate >= 0.0)) throw DomainError("constant intensity: rate must be >= 0");
  return IntensityModel(ConstantIntensity{rate});
}

IntensityModel IntensityModel::sinusoidal(double base, double amplitude, double period) {
  if (!(std::isfinite(base) && base >= 0.0)) throw DomainError("sinusoidal intensity: base must be >= 0");
  if (!(std::isfinite(amplitude) && amplitude >= 0.0)) {
    throw DomainError("sinusoidal intensity: amplitude must be >= 0");
  }
  if (amplitude > base) {
    throw DomainError("sinusoidal intensity: amplitude must not exceed base (rate must stay nonnegative)");
  }
  if (!(std::isfinite(period) && period > 0.0)) throw DomainError("sinusoidal intensity: period must be > 0");
  return IntensityModel(SinusoidalIntensity{base, amplitude, period});
}

IntensityModel IntensityModel::piecewise(std::vector<double> breaks, std::vector<double> levels) {
  if (levels.size() != breaks.size() + 1) {
    throw DomainError("piecewise intensity: need exactly one more level than breaks");
  }
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(std::isfinite(breaks[i]) && breaks[i] > 0.0)) {
      throw DomainError("piecewise intensity: breaks must be > 0");
    }
    if (i > 0 && !(breaks[i] > breaks[i - 1])) {
      throw DomainError("piecewise intensity: breaks must be strictly increasing");
    }
  }
  for (double l : levels) {
    if (!(std::isfinite(l) && l >= 0.0)) throw DomainError("piecewise intensity: levels must be >= 0");
  }
  return IntensityModel(PiecewiseIntensity{std::move(breaks), std::move(levels)});
}

IntensityModel IntensityModel::with_upper_bound(double bound) const {
  if (!(std::isfinite(bound) && bound >= 0.0)) throw DomainError("intensity: max must be >= 0");
  IntensityModel copy = *this;
  copy.bound_ = bound;
  copy.bound_overridden_ = true;
  return copy;
}

IntensityModel IntensityModel::from_term(const Term& t) {
  try {
    std::optional<IntensityModel> im;
    if (t.name == "constant") {
      t.expect_keys({"rate", "max"});
      im = constant(t.number("rate"));
    } else if (t.name == "sinusoidal") {
      t.expect_keys({"base", "amplitude", "period", "max"});
      im = sinusoidal(t.number("base"), t.number("amplitude"), t.number("period"));
    } else if (t.name == "piecewise") {
      t.expect_keys({"breaks", "levels", "max"});
      im = piecewise(t.list("breaks"), t.list("levels"));
    } else {
      throw TermError("unknown intensity kind '" + t.name + "' (expected constant, sinusoidal or piecewise)",
                      t.name_column);
    }
    if (t.has("max")) im = im->with_upper_bound(t.number("max"));
    return *im;
  } catch (const TermError&) {
    throw;
  } catch (const DomainError& e) {
    throw TermError(e.what(), t.name_column);
  }
}

IntensityModel IntensityModel::parse(std::string_view text) { return from_term(parse_term(text)); }

std::string IntensityModel::to_string() const {
  std::string s = std::visit(
      Overloaded{
          [](const ConstantIntensity& c) { return "constant{rate=" + format_number(c.rate); },
          [](const SinusoidalIntensity& c) {
            return "sinusoidal{base=" + format_number(c.base) + ", amplitude=" + format_number(c.amplitude) +
                   ", period=" + format_number(c.period);
          },
          [](const PiecewiseIntensity& c) {
            return "piecewise{breaks=" + format_list(c.breaks) + ", levels=" + format_list(c.levels);
          },
      },
      kind_);
  if (bound_overridden_) s += ", max=" + format_number(bound_);
  return s + "}";
}

double IntensityModel::rate(double t) const {
  return std::visit(Overloaded{
                        [](const ConstantIntensity& c) { return c.rate; },
                        [t](const SinusoidalIntensity& s) {
                          return s.base + s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period);
                        },
                        [t](const PiecewiseIntensity& p) {
                          const auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), t);
                          return p.levels[static_cast<std::size_t>(it - p.breaks.begin())];
                        },
                    },
                    kind_);
}

double IntensityModel::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  return std::visit(Overloaded{
                        [t](const ConstantIntensity& c) { return c.rate * t; },
                        [t](const SinusoidalIntensity& s) {
                          const double w = 2.0 * std::numbers::pi / s.period;
                          // 1 - cos(wt) = 2 sin^2(wt/2), exact near t = 0.
                          const double half = std::sin(0.5 * w * t);
                          return s.base * t + s.amplitude / w * 2.0 * half * half;
                        },
                        [t](const PiecewiseIntensity& p) {
                          double acc = 0.0;
                          double left = 0.0;
                          for (std::size_t i = 0; i < p.breaks.size(); ++i) {
                            if (t <= p.breaks[i]) return acc + p.levels[i] * (t - left);
                            acc += p.levels[i] * (p.breaks[i] - left);
                            left = p.breaks[i];
                          }
                          return acc + p.levels.back() * (t - left);
                        },
                    },
                    kind_);
}

double IntensityModel::inverse_cumulative(double target, double t_hint) const {
  if (!(target >= 0.0)) throw DomainError("inverse_cumulative: target must be >= 0");
  if (target == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const ConstantIntensity& c) {
            if (c.rate == 0.0) throw ModelError("inverse_cumulative: zero intensity never reaches target");
            return target / c.rate;
          },
          [&](const SinusoidalIntensity&) {
            double hi = t_hint > 0.0 ? t_hint : 1.0;
            int guard = 0;
            while (cumulative(hi) < target) {
              hi *= 2.0;
              if (++guard > 200) throw ModelError("inverse_cumulative: target not reachable");
            }
            double lo = 0.0;
            const double tol = 1e-12 * (t_hint > 0.0 ? t_hint : hi);
            while (hi - lo > tol) {
              const double mid = 0.5 * (lo + hi);
              if (cumulative(mid) < target) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            return 0.5 * (lo + hi);
          },
          [&](const PiecewiseIntensity& p) {
            double acc = 0.0;
            double left = 0.0;
            for (std::size_t i = 0; i <= p.breaks.size(); ++i) {
              const double level = p.levels[i];
              const bool last = i == p.breaks.size();
              const double width = last ? INFINITY : p.breaks[i] - left;
              if (level > 0.0 && acc + level * width >= target) return left + (target - acc) / level;
              if (last) break;
              acc += level * width;
              left = p.breaks[i];
            }
            throw ModelError("inverse_cumulative: target not reachable");
          },
      },
      kind_);
}

std::vector<double> IntensityModel::breakpoints() const {
  if (const auto* p = std::get_if<PiecewiseIntensity>(&kind_)) return p->breaks;
  return {};
}

void sample_thinning_into(const IntensityModel& im, double horizon, Rng& rng, std::vector<double>& out) {
  out.clear();
  const double bound = im.upper_bound();
  if (!(horizon > 0.0)) throw DomainError("sample_thinning: horizon must be > 0");
  if (bound == 0.0) return;
  if (!std::isfinite(bound)) throw ModelError("sample_thinning: upper bound must be finite");
  double t = 0.0;
  for (;;) {
    t += rng.exponential(bound);
    if (t > horizon) break;
    const double u = rng.uniform();
    const double lam = im.rate(t);
    if (lam > bound * (1.0 + 1e-12)) {
      throw ModelError("sample_thinning: rate " + format_number(lam) + " at t=" + format_number(t) +
                       " exceeds declared bound " + format_number(bound));
    }
    if (u * bound > lam) continue;
    // A tie can only come from floating-point rounding; drop it so the
    // sequence stays strictly increasing.
    if (!out.empty() && !(t > out.back())) continue;
    out.push_back(t);
  }
}

ArrivalSequence sample_thinning(const IntensityModel& im, double horizon, Rng& rng) {
  ArrivalSequence seq;
  seq.horizon = horizon;
  sample_thinning_into(im, horizon, rng, seq.epochs);
  return seq;
}

ArrivalSequence sample_conditional(const IntensityModel& im, double horizon, std::size_t n, Rng& rng) {
  if (!(horizon > 0.0)) throw DomainError("sample_conditional: horizon must be > 0");
  if (n == 0) throw DomainError("sample_conditional: n must be >= 1");
  const double total = im.cumulative(horizon);
  if (!(total > 0.0)) throw ModelError("sample_conditional: cumulative intensity over [0, T] is zero");
  ArrivalSequence seq;
  seq.horizon = horizon;
  seq.epochs.reserve(n);
  while (seq.epochs.size() < n) {
    const double s = std::min(horizon, im.inverse_cumulative(rng.uniform() * total, horizon));
    if (!(s > 0.0)) continue;
    seq.epochs.push_back(s);
    if (seq.epochs.size() == n) {
      std::sort(seq.epochs.begin(), seq.epochs.end());
      // Redraw on duplicates so the order statistics stay strictly increasing.
      const auto dup = std::adjacent_find(seq.epochs.begin(), seq.epochs.end());
      if (dup != seq.epochs.end()) seq.epochs.erase(dup);
    }
  }
  return seq;
}

std::uint64_t sample_poisson(double mean, Rng& rng) {
  if (!(std::isfinite(mean) && mean >= 0.0)) throw DomainError("sample_poisson: mean must be >= 0");
  constexpr double kChunk = 500.0;
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double m = std::min(mean, kChunk);
    mean -= m;
    double p = std::exp(-m);
    double cdf = p;
    const double u = rng.uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= m / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

}  // namespace ruinlab
