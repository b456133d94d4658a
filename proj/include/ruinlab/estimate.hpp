#pragma once

#include <cstdint>

namespace ruinlab {

/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

/// Point estimate with standard error and a normal-approximation confidence
/// interval. The common return type of every Monte Carlo estimator.
struct EstimateWithCI {
  double point = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t samples = 0;
  /// Set when the estimator saw no nonzero contribution at all.
  bool degenerate = false;

  double relative_error() const noexcept;
  bool contains(double value) const noexcept { return ci_low <= value && value <= ci_high; }
};

/// Streaming first and second moments. Merging is order-sensitive in the last
/// bits, so callers merge in a fixed order to stay reproducible.
class MomentAccumulator {
 public:
  void add(double v) noexcept {
    sum_ += v;
    sum_sq_ += v * v;
    ++count_;
    if (v != 0.0) ++nonzero_;
  }
  void merge(const MomentAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t nonzero() const noexcept { return nonzero_; }
  double sum() const noexcept { return sum_; }
  double mean() const noexcept;
  /// Unbiased sample variance.
  double variance() const noexcept;

  EstimateWithCI estimate(double z = kZ95) const noexcept;

 private:
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::uint64_t count_ = 0;
  std::uint64_t nonzero_ = 0;
};

/// Restricts an estimate of a probability to [0, 1].
EstimateWithCI clamp_probability(EstimateWithCI e) noexcept;

}  // namespace ruinlab
