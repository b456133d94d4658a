#include "ruinlab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>

#include <json.hpp>

#include "ruinlab/detail/overloaded.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/stats.hpp"
#include "ruinlab/term.hpp"

#ifndef RUINLAB_VERSION
#define RUINLAB_VERSION "0.0.0"
#endif
#ifndef RUINLAB_GIT_DESCRIBE
#define RUINLAB_GIT_DESCRIBE "unknown"
#endif

namespace ruinlab {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

std::string join_weights(const std::vector<double>& w) {
  std::string out;
  for (double v : w) {
    if (!out.empty()) out += ' ';
    out += num(v);
  }
  return out;
}

ExperimentResult run_ruin(const std::string& name, const RuinSpec& s, std::uint64_t seed, std::size_t workers) {
  RuinExperimentConfig cfg{s.model(), s.grid.resolve(s.distribution), s.paths, s.estimator, seed, workers};
  const auto est = run_ruin_experiment(cfg);
  ExperimentResult r;
  r.table.header = {"x",     "psi_hat",   "se",    "ci_lo", "ci_hi",         "asymptotic",
                    "ratio", "estimator", "paths", "seed",  "asymptotic_raw"};
  PlotSeries ratio{"psi_hat / integral", {}, {}};
  for (const auto& e : est) {
    r.table.rows.push_back({num(e.x), num(e.psi_hat.point), num(e.psi_hat.std_error), num(e.psi_hat.ci_low),
                            num(e.psi_hat.ci_high), num(e.asymptotic), num(e.ratio), to_string(e.estimator),
                            num(s.paths), num(seed), num(e.asymptotic_raw)});
    ratio.x.push_back(e.x);
    ratio.y.push_back(e.ratio);
    if (e.fell_back) r.notes.push_back("x=" + num(e.x) + ": single-big-jump fell back to crude");
    if (e.psi_hat.degenerate) r.notes.push_back("x=" + num(e.x) + ": no ruin observed (degenerate estimate)");
  }
  r.plot = Plot{name + ": ruin probability / asymptotic integral", "initial surplus x", "ratio", {ratio}, true, 1.0};
  return r;
}

ExperimentResult run_weighted_sums(const std::string& name, const WeightedSumsSpec& s, std::uint64_t seed,
                                   std::size_t workers) {
  const auto xs = s.grid.resolve(s.distribution);
  const McOptions opts{s.paths, seed, workers};
  ExperimentResult r;
  const std::vector<std::string> triple_header = {"x",     "weights",       "p_sum",     "p_sum_se",
                                                  "p_max", "p_max_se",      "sum_marginals", "ratio_sum",
                                                  "ratio_max", "sum_marginals_se", "estimator"};
  auto triple_row = [&](const TailTriple& t, const std::string& weights) {
    return std::vector<std::string>{num(t.x),          weights,
                                    num(t.p_sum.point), num(t.p_sum.std_error),
                                    num(t.p_max.point), num(t.p_max.std_error),
                                    num(t.sum_marginals.point), num(t.ratio_sum()),
                                    num(t.ratio_max()), num(t.sum_marginals.std_error),
                                    to_string(t.estimator)};
  };
  auto note_triple = [&](const TailTriple& t) {
    if (t.degenerate) r.notes.push_back("x=" + num(t.x) + ": no exceedances (degenerate estimate)");
    if (t.domination_violations > 0) {
      r.notes.push_back("x=" + num(t.x) + ": " + std::to_string(t.domination_violations) +
                        " paths with max above sum");
    }
  };

  std::visit(Overloaded{
                 [&](const WeightSpec& w) {
                   const auto triples = estimate_tail_triples(s.dependence, w, xs, opts, s.estimator);
                   r.table.header = triple_header;
                   PlotSeries sum{"p_sum / sum of marginals", {}, {}};
                   PlotSeries max{"p_max / sum of marginals", {}, {}};
                   for (const auto& t : triples) {
                     r.table.rows.push_back(triple_row(t, w.to_string()));
                     note_triple(t);
                     sum.x.push_back(t.x);
                     sum.y.push_back(t.ratio_sum());
                     max.x.push_back(t.x);
                     max.y.push_back(t.ratio_max());
                   }
                   r.plot = Plot{name + ": weighted sum and maximum tails", "x", "ratio", {sum, max}, true, 1.0};
                 },
                 [&](const WeightLattice& l) {
                   r.table.header = triple_header;
                   PlotSeries lo{"min ratio over lattice", {}, {}};
                   PlotSeries hi{"max ratio over lattice", {}, {}};
                   for (double x : xs) {
                     const auto sweep = uniformity_sweep(s.dependence, l.lo, l.hi, l.n, l.points, x, opts, s.estimator);
                     for (std::size_t i = 0; i < sweep.lattice.size(); ++i) {
                       r.table.rows.push_back(triple_row(sweep.triples[i], join_weights(sweep.lattice[i])));
                       note_triple(sweep.triples[i]);
                     }
                     lo.x.push_back(x);
                     lo.y.push_back(sweep.min_ratio);
                     hi.x.push_back(x);
                     hi.y.push_back(sweep.max_ratio);
                   }
                   r.plot = Plot{name + ": uniformity over the weight lattice", "x", "p_sum / sum of marginals",
                                 {lo, hi}, true, 1.0};
                 },
                 [&](const KestenSweep& k) {
                   r.table.header = {"x", "n", "p_sum", "p_sum_se", "reference_tail", "bound_ratio", "fitted_v"};
                   Plot plot{name + ": P(S_n > x) / ((1+eps)^n tail(x))", "x", "bound ratio", {}, false, 1.0};
                   for (double x : xs) {
                     const auto probe = kesten_bound_probe(s.dependence, k.eps, k.n_max, x, opts);
                     for (const auto& p : probe.points) {
                       r.table.rows.push_back({num(x), std::to_string(p.n), num(p.p_sum.point),
                                               num(p.p_sum.std_error), num(probe.reference_tail),
                                               num(p.bound_ratio), num(probe.fitted_v)});
                     }
                   }
                   for (std::size_t n = 1; n <= k.n_max; ++n) {
                     PlotSeries series{"n=" + std::to_string(n), {}, {}};
                     for (const auto& row : r.table.rows) {
                       if (row[1] == std::to_string(n)) {
                         series.x.push_back(std::stod(row[0]));
                         series.y.push_back(std::stod(row[5]));
                       }
                     }
                     if (n == 1 || n == k.n_max || n % 3 == 0) plot.series.push_back(series);
                   }
                   r.plot = plot;
                 },
             },
             s.weights);
  return r;
}

ExperimentResult run_diagnose(const std::string& name, const DiagnoseSpec& s) {
  const auto& d = s.distribution;
  const auto xs = s.grid.resolve(d);
  ExperimentResult r;
  r.table.header = {"x",     "tail",  "log_tail", "quantile_rel_err", "conv_ratio", "h",
                    "insensitivity_ratio", "half_ratio"};
  const bool long_tailed = d.long_tailed();
  const InsensitivityFunction h = long_tailed ? default_insensitivity(d) : InsensitivityFunction::zero();
  PlotSeries conv{"tail of X1+X2 / tail", {}, {}};
  for (double x : xs) {
    const double tail = d.tail(x);
    const double back = tail > 0.0 ? d.inverse_tail(tail) : std::nan("");
    const double conv_ratio = convolution_tail_ratio(d, x, s.quad_tol);
    std::string h_text;
    std::string ins_text;
    if (long_tailed && h(x) < x) {
      const double hx = h(x);
      const double xv[1] = {x};
      h_text = num(hx);
      ins_text = num(insensitivity_check(d, h, xv).front());
    }
    const double half = std::exp(d.log_tail(0.5 * x) - d.log_tail(x));
    r.table.rows.push_back({num(x), num(tail), num(d.log_tail(x)), num(std::abs(back - x) / x), num(conv_ratio),
                            h_text, ins_text, num(half)});
    conv.x.push_back(x);
    conv.y.push_back(conv_ratio);
  }
  r.plot = Plot{name + ": convolution tail ratio", "x", "ratio", {conv}, d.subexponential(), 2.0};
  return r;
}

ExperimentResult run_validate(const std::string& name, const ValidateSpec& s) {
  const auto xs = s.grid.resolve(s.distribution);
  const auto probe = probe_assumption_d3(s.dependence, default_insensitivity(s.distribution), xs);
  ExperimentResult r;
  r.table.header = {"x", "h", "r", "r_majorant", "d3_ii", "d3_iii", "marginal_ratio", "b_event"};
  PlotSeries rs{"r(x)", probe.x, probe.r};
  PlotSeries ms{"marginal tail / tail", probe.x, probe.marginal_ratio};
  for (std::size_t i = 0; i < probe.x.size(); ++i) {
    r.table.rows.push_back({num(probe.x[i]), num(probe.h[i]), num(probe.r[i]), num(probe.r_majorant[i]),
                            num(probe.d3_ii[i]), num(probe.d3_iii[i]), num(probe.marginal_ratio[i]), probe.b_event});
  }
  r.plot = Plot{name + ": conditional tail envelope", "x", "ratio", {rs, ms}, true, 1.0};
  return r;
}

ExperimentResult run_poisson(const PoissonCheckSpec& s, std::uint64_t seed) {
  const auto rep = run_poisson_check(s, seed);
  ExperimentResult r;
  r.table.header = {"metric", "value", "reference"};
  const double lam = rep.cumulative;
  r.table.rows = {
      {"cumulative_intensity", num(lam), ""},
      {"count_mean", num(rep.count_mean), num(lam)},
      {"count_variance", num(rep.count_variance), num(lam)},
      {"chi2_statistic", num(rep.chi2_statistic), ""},
      {"chi2_dof", std::to_string(rep.chi2_dof), ""},
      {"chi2_p_value", num(rep.chi2_p_value), "0.001"},
      {"ks_first_epoch", num(rep.ks_first_epoch), ""},
      {"ks_last_epoch", num(rep.ks_last_epoch), ""},
      {"ks_conditional", num(rep.ks_conditional), "0.02"},
      {"ks_conditional_order", num(rep.ks_conditional_order), ""},
      {"thinning_runs", num(rep.thinning_runs), ""},
      {"conditional_runs", num(rep.conditional_runs), ""},
  };
  if (rep.chi2_p_value < 1e-3) r.notes.push_back("count law chi-square p-value below 0.001");
  return r;
}

}  // namespace

PoissonCheckReport run_poisson_check(const PoissonCheckSpec& s, std::uint64_t seed) {
  const auto& im = s.intensity;
  const double T = s.horizon;
  PoissonCheckReport rep;
  rep.cumulative = im.cumulative(T);

  const std::uint64_t thin_seed = derive_seed(seed, 0);
  const std::uint64_t two_stage_seed = derive_seed(seed, 1);
  const std::uint64_t cond_seed = derive_seed(seed, 2);
  const std::uint64_t given_n_seed = derive_seed(seed, 3);

  std::vector<std::uint64_t> hist;
  MomentAccumulator count;
  std::vector<double> first_thin, last_thin, first_two, last_two;
  std::vector<double> epochs;
  for (std::uint64_t i = 0; i < s.samples; ++i) {
    Rng rng(derive_seed(thin_seed, i));
    sample_thinning_into(im, T, rng, epochs);
    const std::size_t n = epochs.size();
    if (hist.size() <= n) hist.resize(n + 1, 0);
    ++hist[n];
    count.add(static_cast<double>(n));
    if (n > 0) {
      first_thin.push_back(epochs.front());
      last_thin.push_back(epochs.back());
    }
    Rng rng2(derive_seed(two_stage_seed, i));
    const auto m = sample_poisson(rep.cumulative, rng2);
    if (m > 0) {
      const auto seq = sample_conditional(im, T, m, rng2);
      first_two.push_back(seq.epochs.front());
      last_two.push_back(seq.epochs.back());
    }
  }
  rep.thinning_runs = s.samples;
  rep.count_mean = count.mean();
  rep.count_variance = count.variance();
  const auto chi = chi_square_poisson(hist, rep.cumulative);
  rep.chi2_statistic = chi.statistic;
  rep.chi2_dof = chi.dof;
  rep.chi2_p_value = chi.p_value;
  if (!first_thin.empty() && !first_two.empty()) {
    rep.ks_first_epoch = ks_two_sample(first_thin, first_two);
    rep.ks_last_epoch = ks_two_sample(last_thin, last_two);
  }

  // Thinning runs restricted to N(T) = n, against the order-statistics sampler.
  const std::size_t n = s.n;
  std::vector<std::vector<double>> thin_order(n), cond_order(n);
  std::vector<double> thin_pooled, cond_pooled;
  const std::uint64_t max_attempts = std::max<std::uint64_t>(1000000, 2000 * s.conditional_samples);
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
  while (accepted < s.conditional_samples) {
    if (attempts == max_attempts) {
      throw ModelError("poisson-check: N(T) = " + std::to_string(n) + " observed only " + std::to_string(accepted) +
                       " times in " + std::to_string(attempts) + " thinning runs; choose n near the mean count");
    }
    Rng rng(derive_seed(given_n_seed, attempts++));
    sample_thinning_into(im, T, rng, epochs);
    if (epochs.size() != n) continue;
    for (std::size_t k = 0; k < n; ++k) {
      thin_order[k].push_back(epochs[k]);
      thin_pooled.push_back(epochs[k]);
    }
    ++accepted;
  }
  for (std::uint64_t i = 0; i < s.conditional_samples; ++i) {
    Rng rng(derive_seed(cond_seed, i));
    const auto seq = sample_conditional(im, T, n, rng);
    for (std::size_t k = 0; k < n; ++k) {
      cond_order[k].push_back(seq.epochs[k]);
      cond_pooled.push_back(seq.epochs[k]);
    }
  }
  rep.conditional_runs = accepted;
  rep.ks_conditional = ks_two_sample(thin_pooled, cond_pooled);
  for (std::size_t k = 0; k < n; ++k) {
    rep.ks_conditional_order = std::max(rep.ks_conditional_order, ks_two_sample(thin_order[k], cond_order[k]));
  }
  return rep;
}

ExperimentResult execute_experiment(const Experiment& e, std::uint64_t seed, std::size_t workers) {
  return std::visit(Overloaded{
                        [&](const RuinSpec& s) { return run_ruin(e.name, s, seed, workers); },
                        [&](const WeightedSumsSpec& s) { return run_weighted_sums(e.name, s, seed, workers); },
                        [&](const DiagnoseSpec& s) { return run_diagnose(e.name, s); },
                        [&](const ValidateSpec& s) { return run_validate(e.name, s); },
                        [&](const PoissonCheckSpec& s) { return run_poisson(s, seed); },
                    },
                    e.spec);
}

std::string version_string() { return std::string(RUINLAB_VERSION) + "+" + RUINLAB_GIT_DESCRIBE; }

SuiteOutcome run_suite(ExperimentSuite suite, const RunOptions& opts) {
  const auto t0 = Clock::now();
  const std::string canonical = dump_config(suite);
  const std::uint64_t hash = fnv1a64(canonical);

  if (opts.seed) suite.seed = *opts.seed;
  nlohmann::ordered_json paths_override = nullptr;
  if (opts.paths) {
    paths_override = nlohmann::ordered_json::object();
    paths_override["value"] = *opts.paths;
    auto original = nlohmann::ordered_json::object();
    for (auto& e : suite.experiments) {
      if (e.paths() == 0) continue;
      original[e.name] = e.paths();
      e.set_paths(*opts.paths);
    }
    paths_override["original"] = original;
    paths_override["source"] = "--paths";
  }

  const std::string out_dir = opts.out_dir.empty() ? suite.out_dir : opts.out_dir;
  std::filesystem::create_directories(out_dir);

  SuiteOutcome out;
  out.experiments.resize(suite.experiments.size());
  std::mutex log_mutex;
  auto run_one = [&](std::size_t i) {
    const auto& e = suite.experiments[i];
    auto& o = out.experiments[i];
    o.name = e.name;
    o.type = e.type();
    o.seed = suite.experiment_seed(i);
    const auto start = Clock::now();
    try {
      const auto result = execute_experiment(e, o.seed, opts.workers);
      const std::string csv = e.name + ".csv";
      write_file((std::filesystem::path(out_dir) / csv).string(), result.table.to_csv());
      o.csv = csv;
      if (opts.plots && result.plot) {
        const std::string svg = e.name + ".svg";
        write_file((std::filesystem::path(out_dir) / svg).string(), render_svg(*result.plot));
        o.plot = svg;
      }
      o.ok = true;
      std::lock_guard lock(log_mutex);
      for (const auto& note : result.notes) std::clog << "ruinlab: " << e.name << ": " << note << '\n';
    } catch (const std::exception& ex) {
      o.ok = false;
      o.error = ex.what();
      std::lock_guard lock(log_mutex);
      std::clog << "ruinlab: experiment '" << e.name << "' failed: " << ex.what() << '\n';
    }
    o.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  };
  if (opts.parallel) {
    parallel_for(suite.experiments.size(), suite.experiments.size(), run_one);
  } else {
    for (std::size_t i = 0; i < suite.experiments.size(); ++i) run_one(i);
  }

  out.ok = std::all_of(out.experiments.begin(), out.experiments.end(), [](const auto& o) { return o.ok; });

  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx", static_cast<unsigned long long>(hash));
  nlohmann::ordered_json m;
  m["tool"] = "ruinlab";
  m["version"] = version_string();
  m["config_hash"] = std::string("fnv1a64:") + hash_hex;
  m["seed"] = suite.seed;
  m["seed_source"] = opts.seed ? "--seed" : "config";
  m["paths_override"] = paths_override;
  m["workers"] = opts.workers == 0 ? worker_count() : opts.workers;
  m["parallel_experiments"] = opts.parallel;
  m["status"] = out.ok ? "ok" : "failed";
  auto list = nlohmann::ordered_json::array();
  for (const auto& o : out.experiments) {
    nlohmann::ordered_json j;
    j["name"] = o.name;
    j["type"] = to_string(o.type);
    j["seed"] = o.seed;
    j["csv"] = o.csv ? nlohmann::ordered_json(*o.csv) : nlohmann::ordered_json(nullptr);
    j["plot"] = o.plot ? nlohmann::ordered_json(*o.plot) : nlohmann::ordered_json(nullptr);
    j["status"] = o.ok ? "ok" : "failed";
    if (!o.ok) j["error"] = o.error;
    j["wall_time_seconds"] = o.wall_seconds;
    list.push_back(j);
  }
  m["experiments"] = list;
  m["wall_time_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
  out.manifest_path = (std::filesystem::path(out_dir) / "manifest.json").string();
  write_file(out.manifest_path, m.dump(2) + "\n");
  return out;
}

}  // namespace ruinlab
