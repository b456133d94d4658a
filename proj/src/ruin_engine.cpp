#include "ruinlab/ruin_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "ruinlab/parallel.hpp"
#include "ruinlab/quadrature.hpp"

namespace ruinlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void simulate_path_into(const RuinModel& model, std::uint64_t seed, std::uint64_t index, PathRecord& rec) {
  const std::uint64_t path_seed = derive_seed(seed, index);
  Rng arrivals(derive_seed(path_seed, 0));
  Rng claims(derive_seed(path_seed, 1));
  const double r = model.interest;

  rec.latent = model.claims.sample_latent(claims);
  sample_thinning_into(model.intensity, model.horizon, arrivals, rec.epochs);
  const std::size_t n = rec.epochs.size();
  rec.claims.resize(n);
  rec.discounted.resize(n);
  rec.cumulative.resize(n);
  rec.premium.resize(n);

  rec.jump_epochs.clear();
  rec.jump_sizes.clear();
  if (model.premium.has_jumps()) {
    Rng jumps(derive_seed(path_seed, 2));
    double t = 0.0;
    for (;;) {
      t += jumps.exponential(model.premium.jump_rate);
      if (t > model.horizon) break;
      rec.jump_epochs.push_back(t);
      rec.jump_sizes.push_back(jumps.exponential(1.0 / model.premium.jump_mean));
    }
  }

  double total = 0.0;
  double jump_pv = 0.0;
  std::size_t next_jump = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = rec.epochs[k];
    const double x = model.claims.sample_claim(rec.latent, claims);
    rec.claims[k] = x;
    rec.discounted[k] = x * std::exp(-r * s);
    total += rec.discounted[k];
    rec.cumulative[k] = total;
    while (next_jump < rec.jump_epochs.size() && rec.jump_epochs[next_jump] <= s) {
      jump_pv += rec.jump_sizes[next_jump] * std::exp(-r * rec.jump_epochs[next_jump]);
      ++next_jump;
    }
    rec.premium[k] = model.premium_pv(s) + jump_pv;
  }
  for (; next_jump < rec.jump_epochs.size(); ++next_jump) {
    jump_pv += rec.jump_sizes[next_jump] * std::exp(-r * rec.jump_epochs[next_jump]);
  }
  rec.premium_total = model.premium_pv(model.horizon) + jump_pv;
}

struct SbjScratch {
  std::vector<double> deficit;
  std::vector<double> prefix_max;  // max over k < K
  std::vector<double> suffix_max;  // max over k >= K
};

double sbj_term(const RuinModel& model, const PathRecord& path, double x, SbjScratch& s) {
  const std::size_t n = path.count();
  if (n == 0) return 0.0;
  s.deficit.resize(n);
  s.prefix_max.resize(n);
  s.suffix_max.resize(n);
  double m1 = kNegInf;
  double m2 = kNegInf;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    s.deficit[k] = path.cumulative[k] - path.premium[k];
    s.prefix_max[k] = k == 0 ? kNegInf : std::max(s.prefix_max[k - 1], s.deficit[k - 1]);
    const double y = path.discounted[k];
    if (y > m1) {
      m2 = m1;
      m1 = y;
      arg = k;
    } else if (y > m2) {
      m2 = y;
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    s.suffix_max[k] = k + 1 == n ? s.deficit[k] : std::max(s.deficit[k], s.suffix_max[k + 1]);
  }
  double term = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double others_max = n == 1 ? 0.0 : (k == arg ? m2 : m1);
    double threshold = others_max;
    if (!(s.prefix_max[k] > x)) {
      // Smallest discounted claim at K that ruins the path at or after K.
      const double needed = x - s.suffix_max[k] + path.discounted[k];
      threshold = std::max(threshold, needed);
    }
    term += model.claims.conditional_tail(path.latent, threshold * std::exp(model.interest * path.epochs[k]));
  }
  return term;
}

struct RuinAcc {
  std::vector<MomentAccumulator> main;
  std::vector<MomentAccumulator> crude;
  std::vector<MomentAccumulator> pilot;
};

void check_grid(std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw DomainError("ruin: initial surplus must be > 0");
  }
}

}  // namespace

PremiumModel PremiumModel::parse_jumps(std::string_view text, double rate) {
  const Term t = parse_term(text);
  if (t.name != "compound_poisson") {
    throw TermError("unknown premium jump process '" + t.name + "' (expected compound_poisson)", t.name_column);
  }
  t.expect_keys({"rate", "mean"});
  PremiumModel p;
  p.rate = rate;
  p.jump_rate = t.number("rate");
  p.jump_mean = t.number("mean");
  if (!(p.jump_rate >= 0.0 && std::isfinite(p.jump_rate))) {
    throw TermError("compound_poisson: rate must be >= 0", t.name_column);
  }
  if (!(p.jump_mean > 0.0 && std::isfinite(p.jump_mean))) {
    throw TermError("compound_poisson: mean must be > 0", t.name_column);
  }
  return p;
}

std::string PremiumModel::jumps_to_string() const {
  return "compound_poisson{rate=" + format_number(jump_rate) + ", mean=" + format_number(jump_mean) + "}";
}

void RuinModel::validate() const {
  if (!(std::isfinite(interest) && interest > 0.0)) throw DomainError("ruin model: interest r must be > 0");
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw DomainError("ruin model: horizon T must be > 0");
  if (!(std::isfinite(premium.rate) && premium.rate >= 0.0)) {
    throw DomainError("ruin model: premium rate must be >= 0");
  }
  if (!(std::isfinite(premium.jump_rate) && premium.jump_rate >= 0.0)) {
    throw DomainError("ruin model: premium jump rate must be >= 0");
  }
  if (premium.has_jumps() && !(std::isfinite(premium.jump_mean) && premium.jump_mean > 0.0)) {
    throw DomainError("ruin model: premium jump mean must be > 0");
  }
}

double RuinModel::premium_pv(double s) const {
  if (premium.rate == 0.0) return 0.0;
  return premium.rate * -std::expm1(-interest * s) / interest;
}

std::string to_string(RuinEstimator e) { return e == RuinEstimator::Crude ? "crude" : "sbj"; }

RuinEstimator parse_ruin_estimator(std::string_view text) {
  if (text == "crude") return RuinEstimator::Crude;
  if (text == "sbj") return RuinEstimator::SingleBigJump;
  throw DomainError("unknown ruin estimator '" + std::string(text) + "' (expected crude or sbj)");
}

double PathRecord::max_deficit() const {
  double m = kNegInf;
  for (std::size_t k = 0; k < epochs.size(); ++k) m = std::max(m, cumulative[k] - premium[k]);
  return m;
}

PathRecord simulate_path(const RuinModel& model, std::uint64_t seed, std::uint64_t index) {
  PathRecord rec;
  simulate_path_into(model, seed, index, rec);
  return rec;
}

double single_big_jump_term(const RuinModel& model, const PathRecord& path, double x) {
  SbjScratch scratch;
  return sbj_term(model, path, x, scratch);
}

std::vector<EstimateWithCI> estimate_ruin_crude(const RuinModel& model, std::span<const double> xs,
                                                const RuinRunOptions& opts) {
  model.validate();
  check_grid(xs);
  const std::vector<MomentAccumulator> proto(xs.size());
  auto blocks = run_path_blocks(opts.paths, opts.workers, proto,
                                [&](std::uint64_t first, std::uint64_t last, std::vector<MomentAccumulator>& acc) {
                                  PathRecord rec;
                                  for (std::uint64_t p = first; p < last; ++p) {
                                    simulate_path_into(model, opts.seed, p, rec);
                                    const double z = rec.max_deficit();
                                    for (std::size_t i = 0; i < xs.size(); ++i) acc[i].add(z > xs[i] ? 1.0 : 0.0);
                                  }
                                });
  std::vector<EstimateWithCI> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    MomentAccumulator total;
    for (const auto& b : blocks) total.merge(b[i]);
    out.push_back(clamp_probability(total.estimate()));
  }
  return out;
}

EstimateWithCI estimate_ruin_crude(const RuinModel& model, double x, const RuinRunOptions& opts) {
  const double xs[1] = {x};
  return estimate_ruin_crude(model, xs, opts).front();
}

std::uint64_t sbj_pilot_paths(std::uint64_t paths) {
  return std::min<std::uint64_t>(paths, std::max<std::uint64_t>(1000, paths / 100));
}

std::vector<SbjOutcome> estimate_ruin_sbj(const RuinModel& model, std::span<const double> xs,
                                          const RuinRunOptions& opts) {
  model.validate();
  check_grid(xs);
  const std::uint64_t pilot = sbj_pilot_paths(opts.paths);
  const std::size_t m = xs.size();
  const RuinAcc proto{std::vector<MomentAccumulator>(m), std::vector<MomentAccumulator>(m),
                      std::vector<MomentAccumulator>(m)};
  auto blocks = run_path_blocks(opts.paths, opts.workers, proto,
                                [&](std::uint64_t first, std::uint64_t last, RuinAcc& acc) {
                                  PathRecord rec;
                                  SbjScratch scratch;
                                  for (std::uint64_t p = first; p < last; ++p) {
                                    simulate_path_into(model, opts.seed, p, rec);
                                    const double z = rec.max_deficit();
                                    for (std::size_t i = 0; i < m; ++i) {
                                      const double v = sbj_term(model, rec, xs[i], scratch);
                                      acc.main[i].add(v);
                                      acc.crude[i].add(z > xs[i] ? 1.0 : 0.0);
                                      if (p < pilot) acc.pilot[i].add(v);
                                    }
                                  }
                                });
  std::vector<SbjOutcome> out;
  for (std::size_t i = 0; i < m; ++i) {
    MomentAccumulator main;
    MomentAccumulator crude;
    MomentAccumulator pilot_acc;
    for (const auto& b : blocks) {
      main.merge(b.main[i]);
      crude.merge(b.crude[i]);
      pilot_acc.merge(b.pilot[i]);
    }
    const double p_hat = std::clamp(pilot_acc.mean(), 0.0, 1.0);
    const double binomial_var = p_hat * (1.0 - p_hat);
    SbjOutcome o;
    if (pilot_acc.variance() > binomial_var) {
      std::clog << "ruinlab: single-big-jump variance exceeds crude variance at x=" << format_number(xs[i])
                << " in the pilot; using the crude estimator\n";
      o.estimate = clamp_probability(crude.estimate());
      o.fell_back = true;
    } else {
      o.estimate = clamp_probability(main.estimate());
    }
    out.push_back(o);
  }
  return out;
}

EstimateWithCI estimate_ruin_sbj(const RuinModel& model, double x, const RuinRunOptions& opts) {
  const double xs[1] = {x};
  return estimate_ruin_sbj(model, xs, opts).front().estimate;
}

double log_asymptotic_integral(const DependenceModel& dm, const IntensityModel& im, double r, double T,
                               double x, bool use_marginal) {
  if (!(x > 0.0)) throw DomainError("asymptotic_integral: x must be > 0");
  if (!(r > 0.0)) throw DomainError("asymptotic_integral: r must be > 0");
  if (!(T > 0.0)) throw DomainError("asymptotic_integral: T must be > 0");
  auto log_tail = [&](double y) { return use_marginal ? dm.log_marginal_tail(y) : dm.base().log_tail(y); };
  const double ref = log_tail(x);
  auto integrand = [&](double u) { return im.rate(u) * std::exp(log_tail(x * std::exp(r * u)) - ref); };
  std::vector<double> breaks = im.breakpoints();
  const std::vector<double> kinks =
      use_marginal ? dm.marginal_kinks() : std::vector<double>{dm.base().support_min()};
  for (double k : kinks) {
    if (k > x) breaks.push_back(std::log(k / x) / r);
  }
  const auto pts = ruinlab::partition(0.0, T, breaks);
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  opts.max_intervals = 20000;
  const double v = integrate(integrand, std::span<const double>(pts), opts).value;
  return ref + std::log(v);
}

double asymptotic_integral(const DependenceModel& dm, const IntensityModel& im, double r, double T, double x,
                           bool use_marginal) {
  return std::exp(log_asymptotic_integral(dm, im, r, T, x, use_marginal));
}

void RuinExperimentConfig::validate() const {
  model.validate();
  if (x_grid.empty()) throw DomainError("ruin experiment: x grid is empty");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0)) throw DomainError("ruin experiment: x grid values must be > 0");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) throw DomainError("ruin experiment: x grid must be increasing");
  }
  if (paths < 1000) throw DomainError("ruin experiment: paths must be >= 1000");
}

std::vector<RuinEstimate> run_ruin_experiment(const RuinExperimentConfig& cfg) {
  cfg.validate();
  const RuinRunOptions opts{cfg.paths, cfg.seed, cfg.workers};
  std::vector<RuinEstimate> out(cfg.x_grid.size());
  if (cfg.estimator == RuinEstimator::Crude) {
    const auto est = estimate_ruin_crude(cfg.model, cfg.x_grid, opts);
    for (std::size_t i = 0; i < est.size(); ++i) {
      out[i].psi_hat = est[i];
      out[i].estimator = RuinEstimator::Crude;
    }
  } else {
    const auto est = estimate_ruin_sbj(cfg.model, cfg.x_grid, opts);
    for (std::size_t i = 0; i < est.size(); ++i) {
      out[i].psi_hat = est[i].estimate;
      out[i].fell_back = est[i].fell_back;
      out[i].estimator = est[i].fell_back ? RuinEstimator::Crude : RuinEstimator::SingleBigJump;
    }
  }
  const auto& m = cfg.model;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = cfg.x_grid[i];
    out[i].x = x;
    const double log_a = log_asymptotic_integral(m.claims, m.intensity, m.interest, m.horizon, x, true);
    out[i].asymptotic = std::exp(log_a);
    out[i].asymptotic_raw = asymptotic_integral(m.claims, m.intensity, m.interest, m.horizon, x, false);
    const double psi = out[i].psi_hat.point;
    if (out[i].asymptotic > 0.0) {
      out[i].ratio = psi / out[i].asymptotic;
    } else {
      out[i].ratio = psi > 0.0 ? std::exp(std::log(psi) - log_a) : 0.0;
    }
  }
  return out;
}

}  // namespace ruinlab
