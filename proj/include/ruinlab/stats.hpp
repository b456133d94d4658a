#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ruinlab {

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson test of observed counts against Poisson(mean). counts[k] is the
/// number of runs with exactly k events; bins with expected count below 5
/// are pooled, the upper bin absorbing the whole tail.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean);

}  // namespace ruinlab
