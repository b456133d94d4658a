#include "ruinlab/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace ruinlab {

double EstimateWithCI::relative_error() const noexcept {
  return point > 0.0 ? std_error / point : INFINITY;
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
  sum_ += other.sum_;
  sum_sq_ += other.sum_sq_;
  count_ += other.count_;
  nonzero_ += other.nonzero_;
}

double MomentAccumulator::mean() const noexcept {
  return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_);
}

double MomentAccumulator::variance() const noexcept {
  if (count_ < 2) return 0.0;
  const double n = static_cast<double>(count_);
  const double m = sum_ / n;
  return std::max(0.0, (sum_sq_ - n * m * m) / (n - 1.0));
}

EstimateWithCI MomentAccumulator::estimate(double z) const noexcept {
  EstimateWithCI e;
  e.samples = count_;
  e.point = mean();
  e.std_error = count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  e.ci_low = e.point - z * e.std_error;
  e.ci_high = e.point + z * e.std_error;
  e.degenerate = nonzero_ == 0;
  return e;
}

EstimateWithCI clamp_probability(EstimateWithCI e) noexcept {
  e.point = std::clamp(e.point, 0.0, 1.0);
  e.ci_low = std::clamp(e.ci_low, 0.0, 1.0);
  e.ci_high = std::clamp(e.ci_high, 0.0, 1.0);
  return e;
}

}  // namespace ruinlab
