#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/estimate.hpp"
#include "ruinlab/poisson_process.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/stats.hpp"

using namespace ruinlab;

namespace {

constexpr double kTwoPi = 6.283185307179586;

/// Two-sample KS critical value at significance 1e-3.
double ks_critical(std::size_t n, std::size_t m) {
  return 1.949 * std::sqrt(double(n + m) / (double(n) * double(m)));
}

std::vector<IntensityModel> kinds() {
  return {IntensityModel::constant(10.0), IntensityModel::sinusoidal(10.0, 5.0, kTwoPi),
          IntensityModel::piecewise({0.5, 2.0}, {2.0, 0.0, 6.0})};
}

}  // namespace

TEST(Cumulative, Constant) { EXPECT_DOUBLE_EQ(IntensityModel::constant(10.0).cumulative(1.0), 10.0); }

TEST(Cumulative, SinusoidalClosedForm) {
  const auto im = IntensityModel::sinusoidal(10.0, 5.0, kTwoPi);
  for (double t : {0.1, 1.0, 3.0, kTwoPi, 10.0}) {
    EXPECT_NEAR(im.cumulative(t), 10.0 * t + 5.0 * (1.0 - std::cos(t)), 1e-12 * (1.0 + t)) << t;
  }
}

TEST(Cumulative, PiecewiseArea) {
  const auto im = IntensityModel::piecewise({1.0}, {2.0, 4.0});
  EXPECT_DOUBLE_EQ(im.cumulative(1.5), 4.0);
  EXPECT_DOUBLE_EQ(im.cumulative(0.5), 1.0);
}

TEST(Cumulative, MatchesQuadratureOfRate) {
  for (const auto& im : kinds()) {
    for (double t : {0.3, 1.7, 4.0}) {
      const double bp = std::min(t, 0.5), bp2 = std::min(t, 2.0);
      const double ref = oracle::kronrod([&](double u) { return im.rate(u); }, 0.0, bp) +
                         oracle::kronrod([&](double u) { return im.rate(u); }, bp, bp2) +
                         oracle::kronrod([&](double u) { return im.rate(u); }, bp2, t);
      EXPECT_NEAR(im.cumulative(t), ref, 1e-10) << im.to_string() << " t=" << t;
    }
    EXPECT_EQ(im.cumulative(0.0), 0.0);
  }
}

TEST(Cumulative, InverseRoundTrip) {
  for (const auto& im : kinds()) {
    for (double t : {0.01, 0.3, 1.0, 2.5, 6.0}) {
      const double y = im.cumulative(t);
      const double back = im.inverse_cumulative(y, 6.0);
      EXPECT_NEAR(im.cumulative(back), y, 1e-10 * (1.0 + y)) << im.to_string();
    }
  }
  // The flat stretch of the piecewise model maps back to its left end.
  const auto pw = IntensityModel::piecewise({0.5, 2.0}, {2.0, 0.0, 6.0});
  EXPECT_NEAR(pw.inverse_cumulative(1.0, 3.0), 0.5, 1e-12);
}

TEST(Intensity, RejectsNegativeRates) {
  EXPECT_THROW(IntensityModel::sinusoidal(5.0, 6.0, kTwoPi), DomainError);
  EXPECT_THROW(IntensityModel::constant(-1.0), DomainError);
  EXPECT_THROW(IntensityModel::piecewise({1.0}, {1.0, -2.0}), DomainError);
  EXPECT_THROW(IntensityModel::piecewise({1.0, 0.5}, {1.0, 2.0, 3.0}), DomainError);
  EXPECT_THROW(IntensityModel::piecewise({1.0}, {1.0}), DomainError);
}

TEST(Intensity, ParseAndFormat) {
  for (const auto& im : kinds()) EXPECT_EQ(IntensityModel::parse(im.to_string()).to_string(), im.to_string());
  const auto im = IntensityModel::parse("sinusoidal{base=10, amplitude=5, period=6.2831853}");
  EXPECT_DOUBLE_EQ(im.upper_bound(), 15.0);
  EXPECT_DOUBLE_EQ(IntensityModel::parse("constant{rate=3, max=8}").upper_bound(), 8.0);
  // An understated bound parses; thinning reports it.
  const auto low = IntensityModel::parse("constant{rate=3, max=2}");
  Rng rng(1);
  EXPECT_THROW(sample_thinning(low, 100.0, rng), ModelError);
  EXPECT_THROW(IntensityModel::parse("constant{rate=3, max=-1}"), DomainError);
}

TEST(Thinning, HomogeneousMeanAndVariance) {
  const auto im = IntensityModel::sinusoidal(10.0, 0.0, kTwoPi);
  MomentAccumulator acc;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) {
    Rng rng(derive_seed(1, i));
    acc.add(double(sample_thinning(im, 1.0, rng).count()));
  }
  EXPECT_NEAR(acc.mean(), 10.0, 3.0 * std::sqrt(10.0 / runs));
  EXPECT_NEAR(acc.variance(), 10.0, 3.0 * std::sqrt((10.0 + 2.0 * 100.0) / runs));
}

TEST(Thinning, SinusoidalMeanCount) {
  const auto im = IntensityModel::sinusoidal(10.0, 5.0, kTwoPi);
  MomentAccumulator acc;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) {
    Rng rng(derive_seed(2, i));
    acc.add(double(sample_thinning(im, kTwoPi, rng).count()));
  }
  EXPECT_NEAR(im.cumulative(kTwoPi), 20.0 * M_PI, 1e-12);
  EXPECT_NEAR(acc.mean(), 20.0 * M_PI, 3.0 * std::sqrt(20.0 * M_PI / runs));
}

TEST(Thinning, CountLawIsPoisson) {
  const double T = 2.5;
  for (const auto& im : kinds()) {
    std::vector<std::uint64_t> hist;
    for (int i = 0; i < 100000; ++i) {
      Rng rng(derive_seed(3, i));
      const auto n = sample_thinning(im, T, rng).count();
      if (hist.size() <= n) hist.resize(n + 1, 0);
      ++hist[n];
    }
    const auto chi = chi_square_poisson(hist, im.cumulative(T));
    EXPECT_GT(chi.p_value, 1e-3) << im.to_string() << " chi2=" << chi.statistic << " dof=" << chi.dof;
    EXPECT_GT(chi.dof, 3);
  }
}

TEST(Thinning, EpochsStrictlyIncreasingWithinHorizon) {
  for (const auto& im : kinds()) {
    Rng rng(4);
    for (int i = 0; i < 2000; ++i) {
      const auto seq = sample_thinning(im, 3.0, rng);
      for (std::size_t k = 0; k < seq.count(); ++k) {
        ASSERT_GT(seq.epochs[k], 0.0);
        ASSERT_LE(seq.epochs[k], 3.0);
        if (k > 0) ASSERT_LT(seq.epochs[k - 1], seq.epochs[k]);
      }
    }
  }
}

TEST(Thinning, ZeroRateSegmentsGetNoArrivals) {
  const auto im = IntensityModel::piecewise({0.5, 2.0}, {2.0, 0.0, 6.0});
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    for (double e : sample_thinning(im, 3.0, rng).epochs) ASSERT_TRUE(e <= 0.5 || e > 2.0) << e;
  }
}

TEST(Thinning, SameSeedSameSequence) {
  const auto im = IntensityModel::sinusoidal(10.0, 5.0, kTwoPi);
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_thinning(im, 2.0, a).epochs, sample_thinning(im, 2.0, b).epochs);
}

TEST(Thinning, ShorterHorizonIsPrefix) {
  const auto im = IntensityModel::sinusoidal(10.0, 5.0, kTwoPi);
  for (int i = 0; i < 500; ++i) {
    Rng a(derive_seed(6, i)), b(derive_seed(6, i));
    const auto short_seq = sample_thinning(im, 1.0, a).epochs;
    const auto long_seq = sample_thinning(im, 3.0, b).epochs;
    ASSERT_LE(short_seq.size(), long_seq.size());
    for (std::size_t k = 0; k < short_seq.size(); ++k) ASSERT_EQ(short_seq[k], long_seq[k]);
  }
}

TEST(Thinning, ViolatedBoundIsModelError) {
  const auto im = IntensityModel::sinusoidal(10.0, 5.0, kTwoPi).with_upper_bound(11.0);
  Rng rng(8);
  EXPECT_THROW(
      {
        for (int i = 0; i < 100; ++i) sample_thinning(im, kTwoPi, rng);
      },
      ModelError);
}

TEST(Conditional, ConstantIntensityIsUniform) {
  const auto im = IntensityModel::constant(3.0);
  MomentAccumulator acc;
  for (int i = 0; i < 100000; ++i) {
    Rng rng(derive_seed(9, i));
    acc.add(sample_conditional(im, 2.0, 1, rng).epochs[0]);
  }
  EXPECT_TRUE(oracle::within_sigma(acc.estimate(), 1.0)) << acc.mean();
}

TEST(Conditional, SinusoidalMeanEpochMatchesQuadrature) {
  const auto im = IntensityModel::sinusoidal(10.0, 5.0, kTwoPi);
  const double T = kTwoPi;
  const double ref = oracle::kronrod([&](double s) { return s * im.rate(s); }, 0.0, T) / im.cumulative(T);
  MomentAccumulator acc;
  for (int i = 0; i < 100000; ++i) {
    Rng rng(derive_seed(10, i));
    acc.add(sample_conditional(im, T, 1, rng).epochs[0]);
  }
  EXPECT_TRUE(oracle::within_sigma(acc.estimate(), ref)) << acc.mean() << " vs " << ref;
}

TEST(Conditional, SortedDistinctAndInRange) {
  const auto im = IntensityModel::piecewise({1.0}, {1.0, 5.0});
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto seq = sample_conditional(im, 2.0, 25, rng);
    ASSERT_EQ(seq.count(), 25u);
    for (std::size_t k = 0; k < seq.count(); ++k) {
      ASSERT_GT(seq.epochs[k], 0.0);
      ASSERT_LE(seq.epochs[k], 2.0);
      if (k > 0) ASSERT_LT(seq.epochs[k - 1], seq.epochs[k]);
    }
  }
}

TEST(Conditional, MatchesThinningGivenCount) {
  // Mean count pi, so N(T) = 3 is common enough to condition on by rejection.
  const auto im = IntensityModel::sinusoidal(0.5, 0.25, kTwoPi);
  const double T = kTwoPi;
  std::vector<double> thin, cond;
  for (std::uint64_t i = 0; thin.size() < 3 * 10000; ++i) {
    Rng rng(derive_seed(12, i));
    const auto seq = sample_thinning(im, T, rng);
    if (seq.count() == 3) thin.insert(thin.end(), seq.epochs.begin(), seq.epochs.end());
  }
  for (int i = 0; i < 10000; ++i) {
    Rng rng(derive_seed(13, i));
    const auto seq = sample_conditional(im, T, 3, rng);
    cond.insert(cond.end(), seq.epochs.begin(), seq.epochs.end());
  }
  EXPECT_LT(ks_two_sample(thin, cond), 0.02);
}

TEST(Conditional, TwoStageSamplerMatchesThinning) {
  const auto im = IntensityModel::sinusoidal(3.0, 2.0, 2.0);
  const double T = 2.0;
  std::vector<double> first_thin, last_thin, first_two, last_two;
  for (int i = 0; i < 50000; ++i) {
    Rng rng(derive_seed(14, i));
    const auto seq = sample_thinning(im, T, rng);
    if (seq.count() > 0) {
      first_thin.push_back(seq.epochs.front());
      last_thin.push_back(seq.epochs.back());
    }
    Rng rng2(derive_seed(15, i));
    const auto n = sample_poisson(im.cumulative(T), rng2);
    if (n > 0) {
      const auto two = sample_conditional(im, T, n, rng2);
      first_two.push_back(two.epochs.front());
      last_two.push_back(two.epochs.back());
    }
  }
  EXPECT_LT(ks_two_sample(first_thin, first_two), ks_critical(first_thin.size(), first_two.size()));
  EXPECT_LT(ks_two_sample(last_thin, last_two), ks_critical(last_thin.size(), last_two.size()));
}

TEST(Conditional, DegenerateModelIsModelError) {
  Rng rng(16);
  EXPECT_THROW(sample_conditional(IntensityModel::constant(0.0), 1.0, 2, rng), ModelError);
  EXPECT_THROW(sample_conditional(IntensityModel::piecewise({1.0}, {0.0, 3.0}), 0.5, 1, rng), ModelError);
}

TEST(SamplePoisson, MeanAndZeroMean) {
  Rng rng(17);
  EXPECT_EQ(sample_poisson(0.0, rng), 0u);
  for (double mean : {0.3, 4.0, 700.0}) {
    MomentAccumulator acc;
    for (int i = 0; i < 100000; ++i) acc.add(double(sample_poisson(mean, rng)));
    EXPECT_NEAR(acc.mean(), mean, 3.5 * std::sqrt(mean / 1e5)) << mean;
    EXPECT_NEAR(acc.variance(), mean, 4.0 * std::sqrt((mean + 2 * mean * mean) / 1e5)) << mean;
  }
}

TEST(Stats, KsStatisticBasics) {
  const std::vector<double> a = {1, 2, 3, 4};
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
  const std::vector<double> b = {5, 6, 7};
  EXPECT_EQ(ks_two_sample(a, b), 1.0);
  const std::vector<double> c = {1.5, 3.5};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, c), 0.25);
}
