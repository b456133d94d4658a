#include "ruinlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ruinlab/errors.hpp"

namespace ruinlab {

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean) {
  if (!(mean > 0.0)) throw DomainError("chi_square_poisson: mean must be > 0");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw DomainError("chi_square_poisson: no observations");
  const boost::math::poisson_distribution<double> law(mean);
  const double n = static_cast<double>(total);

  // Bins [lo_k, hi_k]; the last bin is open to the right.
  std::vector<double> expected;
  std::vector<double> observed;
  double exp_acc = 0.0;
  double obs_acc = 0.0;
  const auto kmax = static_cast<std::uint64_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 20.0));
  double cdf_before = 0.0;
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    const double pk = boost::math::pdf(law, static_cast<double>(k));
    exp_acc += n * pk;
    cdf_before += pk;
    obs_acc += k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
    const double tail_expected = n * (1.0 - cdf_before);
    if (exp_acc >= 5.0 && tail_expected >= 5.0) {
      expected.push_back(exp_acc);
      observed.push_back(obs_acc);
      exp_acc = 0.0;
      obs_acc = 0.0;
    }
  }
  // Everything left (including counts beyond kmax) goes into the last bin.
  for (std::size_t k = kmax + 1; k < counts.size(); ++k) obs_acc += static_cast<double>(counts[k]);
  exp_acc += n * std::max(0.0, 1.0 - cdf_before);
  if (expected.empty()) {
    expected.push_back(exp_acc);
    observed.push_back(obs_acc);
  } else {
    expected.back() += exp_acc;
    observed.back() += obs_acc;
  }

  ChiSquareResult r;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double d = observed[i] - expected[i];
    r.statistic += d * d / expected[i];
  }
  r.dof = static_cast<int>(expected.size()) - 1;
  r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
  return r;
}

}  // namespace ruinlab
