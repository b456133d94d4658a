#include "ruinlab/weighted_sums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ruinlab/parallel.hpp"

namespace ruinlab {

namespace {

struct PointAcc {
  MomentAccumulator sum;
  MomentAccumulator max;
  MomentAccumulator marg;
  MomentAccumulator pairs;
  std::uint64_t violations = 0;

  void merge(const PointAcc& o) {
    sum.merge(o.sum);
    max.merge(o.max);
    marg.merge(o.marg);
    pairs.merge(o.pairs);
    violations += o.violations;
  }
};

// Adds one path's contribution at threshold x to acc. `y` holds theta_i X_i.
void accumulate(const DependenceModel& dm, Latent latent, std::span<const double> weights,
                std::span<const double> y, double x, bool conditional, PointAcc& acc) {
  const std::size_t n = y.size();
  double total = 0.0;
  double m1 = -std::numeric_limits<double>::infinity();
  double m2 = m1;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += y[i];
    if (y[i] > m1) {
      m2 = m1;
      m1 = y[i];
      arg = i;
    } else if (y[i] > m2) {
      m2 = y[i];
    }
  }
  double s_term = 0.0;
  double m_term = 0.0;
  double marg_term = 0.0;
  double pair_term = 0.0;
  if (!conditional) {
    s_term = total > x ? 1.0 : 0.0;
    m_term = m1 > x ? 1.0 : 0.0;
    std::size_t k = 0;
    for (double v : y) k += v > x ? 1 : 0;
    marg_term = static_cast<double>(k);
    pair_term = 0.5 * static_cast<double>(k) * static_cast<double>(k > 0 ? k - 1 : 0);
  } else {
    double tail_sum = 0.0;
    double tail_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double others_max = n == 1 ? 0.0 : (i == arg ? m2 : m1);
      double others_sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) others_sum += j == i ? 0.0 : y[j];
      const double theta = weights[i];
      s_term += dm.conditional_tail(latent, std::max(others_max, x - others_sum) / theta);
      m_term += dm.conditional_tail(latent, std::max(others_max, x) / theta);
      const double p = dm.conditional_tail(latent, x / theta);
      tail_sum += p;
      tail_sq += p * p;
    }
    marg_term = tail_sum;
    pair_term = 0.5 * (tail_sum * tail_sum - tail_sq);
  }
  if (m_term > s_term) ++acc.violations;
  acc.sum.add(s_term);
  acc.max.add(m_term);
  acc.marg.add(marg_term);
  acc.pairs.add(pair_term);
}

bool use_conditional(const DependenceModel& dm, double x, TailEstimator e) {
  switch (e) {
    case TailEstimator::Crude:
      return false;
    case TailEstimator::Conditional:
      return true;
    case TailEstimator::Auto:
      return dm.base().tail(x) < kRareEventScale;
  }
  return false;
}

TailTriple finish(double x, const PointAcc& acc, bool conditional) {
  TailTriple t;
  t.x = x;
  t.p_sum = acc.sum.estimate();
  t.p_max = acc.max.estimate();
  t.sum_marginals = acc.marg.estimate();
  t.pair_exceedances = acc.pairs.estimate();
  t.estimator = conditional ? TailEstimator::Conditional : TailEstimator::Crude;
  t.domination_violations = acc.violations;
  t.degenerate = t.p_sum.degenerate && t.p_max.degenerate && t.sum_marginals.degenerate;
  return t;
}

void check_paths(std::uint64_t paths) {
  if (paths < 1000) throw DomainError("weighted sums: paths must be >= 1000");
}

// Runs `paths` simulations; for each path calls
// visit(latent, claims, rng, acc, scratch) with 2 * n_claims scratch slots.
template <class Visit>
std::vector<PointAcc> simulate(const DependenceModel& dm, std::size_t n_claims, std::size_t n_points,
                               const McOptions& opts, Visit&& visit) {
  const std::vector<PointAcc> proto(n_points);
  auto blocks = run_path_blocks(opts.paths, opts.workers, proto,
                                [&](std::uint64_t first, std::uint64_t last, std::vector<PointAcc>& acc) {
                                  std::vector<double> claims(n_claims);
                                  std::vector<double> scratch(2 * n_claims);
                                  for (std::uint64_t p = first; p < last; ++p) {
                                    Rng rng(derive_seed(opts.seed, p));
                                    const Latent latent = dm.sample_latent(rng);
                                    dm.sample_claims(latent, claims, rng);
                                    visit(latent, std::span<const double>(claims), rng, acc, std::span<double>(scratch));
                                  }
                                });
  std::vector<PointAcc> total(n_points);
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < n_points; ++i) total[i].merge(b[i]);
  }
  return total;
}

}  // namespace

WeightSpec WeightSpec::deterministic(std::vector<double> weights) {
  if (weights.empty()) throw DomainError("weights: need at least one weight");
  for (double c : weights) {
    if (!(std::isfinite(c) && c > 0.0)) throw DomainError("weights: deterministic weights must be > 0");
  }
  WeightSpec w;
  w.kind_ = Kind::Deterministic;
  w.n_ = weights.size();
  w.values_ = std::move(weights);
  return w;
}

WeightSpec WeightSpec::random_uniform(std::size_t n, double lo, double hi) {
  if (n == 0) throw DomainError("weights: n must be >= 1");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi > lo)) {
    throw DomainError("weights: uniform law needs 0 <= lo < hi < inf");
  }
  WeightSpec w;
  w.kind_ = Kind::RandomUniform;
  w.n_ = n;
  w.lo_ = lo;
  w.hi_ = hi;
  return w;
}

WeightSpec WeightSpec::from_term(const Term& t) {
  try {
    if (t.name == "deterministic") {
      t.expect_keys({"c"});
      return deterministic(t.list("c"));
    }
    if (t.name == "uniform") {
      t.expect_keys({"n", "lo", "hi"});
      const double n = t.number("n");
      if (!(n >= 1.0 && n == std::floor(n))) throw DomainError("weights: n must be a positive integer");
      return random_uniform(static_cast<std::size_t>(n), t.number("lo"), t.number("hi"));
    }
  } catch (const TermError&) {
    throw;
  } catch (const DomainError& e) {
    throw TermError(e.what(), t.name_column);
  }
  throw TermError("unknown weight spec '" + t.name + "' (expected deterministic or uniform)", t.name_column);
}

WeightSpec WeightSpec::parse(std::string_view text) { return from_term(parse_term(text)); }

std::string WeightSpec::to_string() const {
  if (kind_ == Kind::Deterministic) return "deterministic{c=" + format_list(values_) + "}";
  return "uniform{n=" + std::to_string(n_) + ", lo=" + format_number(lo_) + ", hi=" + format_number(hi_) + "}";
}

double WeightSpec::bound() const noexcept {
  if (kind_ == Kind::Deterministic) return *std::max_element(values_.begin(), values_.end());
  return hi_;
}

void WeightSpec::sample(Rng& rng, std::span<double> out) const {
  if (kind_ == Kind::Deterministic) {
    std::copy(values_.begin(), values_.end(), out.begin());
    return;
  }
  // u in (0, 1) maps to (lo, hi); hi itself has probability zero either way.
  for (double& v : out) v = lo_ + (hi_ - lo_) * rng.uniform();
}

std::string to_string(TailEstimator e) {
  switch (e) {
    case TailEstimator::Crude:
      return "crude";
    case TailEstimator::Conditional:
      return "conditional";
    case TailEstimator::Auto:
      return "auto";
  }
  return "auto";
}

TailEstimator parse_tail_estimator(std::string_view text) {
  if (text == "crude") return TailEstimator::Crude;
  if (text == "conditional") return TailEstimator::Conditional;
  if (text == "auto") return TailEstimator::Auto;
  throw DomainError("unknown tail estimator '" + std::string(text) + "' (expected crude, conditional or auto)");
}

std::vector<TailTriple> estimate_tail_triples(const DependenceModel& dm, const WeightSpec& w,
                                              std::span<const double> xs, const McOptions& opts,
                                              TailEstimator estimator) {
  check_paths(opts.paths);
  for (double x : xs) {
    if (!(x > 0.0)) throw DomainError("estimate_tail_triple: x must be > 0");
  }
  const std::size_t n = w.size();
  std::vector<char> conditional(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) conditional[i] = use_conditional(dm, xs[i], estimator);
  auto totals = simulate(dm, n, xs.size(), opts,
                         [&](Latent latent, std::span<const double> claims, Rng& rng, std::vector<PointAcc>& acc,
                             std::span<double> scratch) {
                           const auto wspan = scratch.first(n);
                           const auto y = scratch.last(n);
                           w.sample(rng, wspan);
                           for (std::size_t i = 0; i < n; ++i) y[i] = wspan[i] * claims[i];
                           for (std::size_t k = 0; k < xs.size(); ++k) {
                             accumulate(dm, latent, wspan, y, xs[k], conditional[k], acc[k]);
                           }
                         });
  std::vector<TailTriple> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out.push_back(finish(xs[k], totals[k], conditional[k]));
  return out;
}

TailTriple estimate_tail_triple(const DependenceModel& dm, const WeightSpec& w, double x,
                                const McOptions& opts, TailEstimator estimator) {
  const double xs[1] = {x};
  return estimate_tail_triples(dm, w, xs, opts, estimator).front();
}

double SweepResult::worst_deviation() const noexcept {
  return std::max(std::abs(max_ratio - 1.0), std::abs(min_ratio - 1.0));
}

SweepResult uniformity_sweep(const DependenceModel& dm, double lo, double hi, std::size_t n,
                             std::size_t grid_per_dim, double x, const McOptions& opts,
                             TailEstimator estimator) {
  check_paths(opts.paths);
  if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) throw DomainError("uniformity_sweep: need 0 < a < b < inf");
  if (n == 0) throw DomainError("uniformity_sweep: n must be >= 1");
  if (grid_per_dim < 2) throw DomainError("uniformity_sweep: grid_per_dim must be >= 2");
  if (!(x > 0.0)) throw DomainError("uniformity_sweep: x must be > 0");
  double points = 1.0;
  for (std::size_t i = 0; i < n; ++i) points *= static_cast<double>(grid_per_dim);
  if (static_cast<double>(n) * points > static_cast<double>(kSweepBudget)) {
    throw DomainError("uniformity_sweep: n * grid_per_dim^n = " + format_number(static_cast<double>(n) * points) +
                      " exceeds the budget of " + std::to_string(kSweepBudget));
  }
  std::vector<double> axis(grid_per_dim);
  for (std::size_t g = 0; g < grid_per_dim; ++g) {
    axis[g] = g + 1 == grid_per_dim ? hi : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_per_dim - 1);
  }
  SweepResult result;
  const std::size_t count = static_cast<std::size_t>(points);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::vector<double> c(n);
    std::size_t rest = idx;
    for (std::size_t d = n; d-- > 0;) {
      c[d] = axis[rest % grid_per_dim];
      rest /= grid_per_dim;
    }
    result.lattice.push_back(std::move(c));
  }
  const bool conditional = use_conditional(dm, x, estimator);
  auto totals = simulate(dm, n, count, opts,
                         [&](Latent latent, std::span<const double> claims, Rng&, std::vector<PointAcc>& acc,
                             std::span<double> scratch) {
                           const auto y = scratch.first(n);
                           for (std::size_t k = 0; k < count; ++k) {
                             const auto& c = result.lattice[k];
                             for (std::size_t i = 0; i < n; ++i) y[i] = c[i] * claims[i];
                             accumulate(dm, latent, c, y, x, conditional, acc[k]);
                           }
                         });
  result.min_ratio = std::numeric_limits<double>::infinity();
  result.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    result.triples.push_back(finish(x, totals[k], conditional));
    const double ratio = result.triples.back().ratio_sum();
    result.min_ratio = std::min(result.min_ratio, ratio);
    result.max_ratio = std::max(result.max_ratio, ratio);
  }
  return result;
}

KestenProbe kesten_bound_probe(const DependenceModel& dm, double eps, std::size_t n_max, double x,
                               const McOptions& opts) {
  check_paths(opts.paths);
  if (!(eps > 0.0)) throw DomainError("kesten_bound_probe: eps must be > 0");
  if (n_max == 0) throw DomainError("kesten_bound_probe: n_max must be >= 1");
  if (!(x > 0.0)) throw DomainError("kesten_bound_probe: x must be > 0");
  auto totals = simulate(dm, n_max, n_max, opts,
                         [&](Latent, std::span<const double> claims, Rng&, std::vector<PointAcc>& acc,
                             std::span<double>) {
                           double partial = 0.0;
                           for (std::size_t k = 0; k < n_max; ++k) {
                             partial += claims[k];
                             acc[k].sum.add(partial > x ? 1.0 : 0.0);
                           }
                         });
  KestenProbe probe;
  probe.x = x;
  probe.eps = eps;
  probe.reference_tail = dm.marginal_tail(x);
  for (std::size_t k = 0; k < n_max; ++k) {
    KestenPoint pt;
    pt.n = k + 1;
    pt.p_sum = totals[k].sum.estimate();
    pt.bound_ratio = pt.p_sum.point / (std::pow(1.0 + eps, static_cast<double>(pt.n)) * probe.reference_tail);
    probe.fitted_v = std::max(probe.fitted_v, pt.bound_ratio);
    probe.points.push_back(pt);
  }
  return probe;
}

}  // namespace ruinlab
