#pragma once

// Nonhomogeneous Poisson arrivals: unconditional sampling on [0, T] by
// Lewis-Shedler thinning, and sampling given N(T) = n from the order
// statistics of n i.i.d. epochs with density rate(s) / cumulative(T).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ruinlab/rng.hpp"
#include "ruinlab/term.hpp"

namespace ruinlab {

struct ConstantIntensity {
  double rate;
};

/// rate(t) = base + amplitude * sin(2 pi t / period), amplitude <= base.
struct SinusoidalIntensity {
  double base;
  double amplitude;
  double period;
};

/// levels[0] on [0, breaks[0]), levels[i] on [breaks[i-1], breaks[i]), and
/// levels.back() after the last break.
struct PiecewiseIntensity {
  std::vector<double> breaks;
  std::vector<double> levels;
};

class IntensityModel {
 public:
  using Kind = std::variant<ConstantIntensity, SinusoidalIntensity, PiecewiseIntensity>;

  static IntensityModel constant(double rate);
  static IntensityModel sinusoidal(double base, double amplitude, double period);
  static IntensityModel piecewise(std::vector<double> breaks, std::vector<double> levels);

  /// `constant{rate=10}`, `sinusoidal{base=10, amplitude=5, period=6.28}`,
  /// `piecewise{breaks=[1], levels=[2, 4]}`. Every form also accepts an
  /// optional `max=` to declare the thinning bound explicitly.
  static IntensityModel from_term(const Term& term);
  static IntensityModel parse(std::string_view text);
  std::string to_string() const;

  const Kind& kind() const noexcept { return kind_; }

  double rate(double t) const;
  /// Integral of rate over [0, t], in closed form.
  double cumulative(double t) const;
  /// Smallest t >= 0 with cumulative(t) == target; t_hint brackets the root
  /// for the sinusoidal kind (bisection to 1e-12 * t_hint).
  double inverse_cumulative(double target, double t_hint) const;
  /// Declared bound used for thinning: the exact supremum unless overridden.
  double upper_bound() const noexcept { return bound_; }
  /// Points where rate is discontinuous.
  std::vector<double> breakpoints() const;

  /// Replaces the thinning bound (used to declare a bound from configuration).
  IntensityModel with_upper_bound(double bound) const;

 private:
  explicit IntensityModel(Kind k);
  Kind kind_;
  double bound_ = 0.0;
  bool bound_overridden_ = false;
};

struct ArrivalSequence {
  std::vector<double> epochs;  // strictly increasing, all in (0, horizon]
  double horizon = 0.0;

  std::size_t count() const noexcept { return epochs.size(); }
};

/// Thinning: candidates from a homogeneous Poisson(upper_bound) stream are
/// accepted with probability rate(t) / upper_bound. Candidates are generated
/// in time order, so the epochs for horizon T1 < T2 from the same generator
/// state are a prefix of those for T2. Throws ModelError if rate(t) exceeds
/// the declared bound at a candidate.
ArrivalSequence sample_thinning(const IntensityModel& im, double horizon, Rng& rng);
void sample_thinning_into(const IntensityModel& im, double horizon, Rng& rng, std::vector<double>& out);

/// Order statistics of n i.i.d. epochs with density rate(s) / cumulative(T).
/// Throws ModelError when cumulative(T) == 0.
ArrivalSequence sample_conditional(const IntensityModel& im, double horizon, std::size_t n, Rng& rng);

/// Poisson(mean) count by inversion (chunked for large means).
std::uint64_t sample_poisson(double mean, Rng& rng);

}  // namespace ruinlab
