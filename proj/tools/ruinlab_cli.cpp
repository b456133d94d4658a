// ruinlab command line: runs experiment suites and single experiment types.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ruinlab/config.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/ruin_engine.hpp"
#include "ruinlab/suite.hpp"
#include "ruinlab/term.hpp"

namespace {

using namespace ruinlab;

struct Globals {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
  bool plots = false;
  bool parallel = false;
};

ExperimentSuite load(const Globals& g) {
  if (g.config.empty()) throw ConfigError({{0, 0, "--config FILE is required"}});
  return parse_config_file(g.config);
}

/// Keeps experiments of one type; `--seed` and `--paths` apply as in `run`.
int run_type(const Globals& g, ExperimentType type, const std::string& out_csv,
             const std::optional<std::vector<double>>& x_grid) {
  ExperimentSuite suite = load(g);
  if (g.seed) suite.seed = *g.seed;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < suite.experiments.size(); ++i) {
    if (suite.experiments[i].type() == type) picked.push_back(i);
  }
  if (picked.empty()) {
    std::cerr << "ruinlab: the config has no " << to_string(type) << " experiment\n";
    return 2;
  }
  if (!out_csv.empty() && picked.size() != 1) {
    std::cerr << "ruinlab: --out needs exactly one " << to_string(type) << " experiment (found " << picked.size()
              << "); use --out-dir\n";
    return 2;
  }
  int status = 0;
  for (std::size_t i : picked) {
    Experiment e = suite.experiments[i];
    const std::uint64_t seed = suite.experiment_seed(i);
    if (g.paths) e.set_paths(*g.paths);
    if (x_grid) {
      std::visit([&](auto& s) {
        if constexpr (requires { s.grid; }) s.grid = GridSpec{false, *x_grid};
      }, e.spec);
    }
    try {
      const auto result = execute_experiment(e, seed);
      for (const auto& note : result.notes) std::clog << "ruinlab: " << e.name << ": " << note << '\n';
      const std::string csv = result.table.to_csv();
      if (!out_csv.empty()) {
        write_file(out_csv, csv);
      } else if (!g.out_dir.empty()) {
        std::filesystem::create_directories(g.out_dir);
        write_file((std::filesystem::path(g.out_dir) / (e.name + ".csv")).string(), csv);
        if (g.plots && result.plot) {
          write_file((std::filesystem::path(g.out_dir) / (e.name + ".svg")).string(), render_svg(*result.plot));
        }
      } else {
        if (picked.size() > 1) std::cout << "# " << e.name << '\n';
        std::cout << csv;
      }
    } catch (const std::exception& ex) {
      std::cerr << "ruinlab: experiment '" << e.name << "' failed: " << ex.what() << '\n';
      status = 1;
    }
  }
  return status;
}

int run_asymptotic(const Globals& g, const std::vector<double>& xs) {
  const ExperimentSuite suite = load(g);
  bool any = false;
  std::cout << "experiment,x,asymptotic,asymptotic_raw\n";
  for (const auto& e : suite.experiments) {
    const auto* s = std::get_if<RuinSpec>(&e.spec);
    if (!s) continue;
    any = true;
    const auto grid = xs.empty() ? s->grid.resolve(s->distribution) : xs;
    for (double x : grid) {
      const double a = asymptotic_integral(s->dependence, s->intensity, s->interest, s->horizon, x, true);
      const double raw = asymptotic_integral(s->dependence, s->intensity, s->interest, s->horizon, x, false);
      std::cout << e.name << ',' << format_number(x) << ',' << format_number(a) << ',' << format_number(raw) << '\n';
    }
  }
  if (!any) {
    std::cerr << "ruinlab: the config has no ruin experiment\n";
    return 2;
  }
  return 0;
}

std::vector<double> parse_list_option(const std::string& text) {
  return text.empty() ? std::vector<double>{} : parse_number_list(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ruinlab: finite-time ruin and randomly weighted sums under heavy tails"};
  app.set_version_flag("--version", ruinlab::version_string());
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  std::uint64_t paths = 0;
  app.add_option("--config", g.config, "Experiment configuration file");
  app.add_option("--out-dir", g.out_dir, "Output directory (overrides out_dir in the config)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* paths_opt = app.add_option("--paths", paths, "Paths per experiment (overrides the config)")
                        ->check(CLI::Range(std::uint64_t{1000}, std::uint64_t{1} << 50));
  app.add_flag("--plots", g.plots, "Write SVG ratio plots next to the CSVs");
  app.add_flag("--parallel", g.parallel, "Run experiments concurrently");
  app.fallthrough();

  std::string out_csv;
  std::string x_text;

  auto* run = app.add_subcommand("run", "Run every experiment in the config and write a manifest");
  auto* ruin = app.add_subcommand("simulate-ruin", "Estimate finite-time ruin probabilities");
  ruin->add_option("--out", out_csv, "CSV output file");
  auto* asym = app.add_subcommand("asymptotic", "Print the asymptotic ruin integral");
  asym->add_option("--x", x_text, "Initial surplus values, e.g. 10,100,1000 (default: the config grid)");
  auto* ws = app.add_subcommand("weighted-sums", "Tails of randomly weighted sums and maxima");
  ws->add_option("--out", out_csv, "CSV output file");
  ws->add_option("--x-grid", x_text, "x values replacing the config grid");
  auto* diag = app.add_subcommand("diagnose-dist", "Tail, quantile and subexponentiality diagnostics");
  diag->add_option("--out", out_csv, "CSV output file");
  auto* val = app.add_subcommand("validate-assumptions", "Probe the conditional tail envelope r(x)");
  val->add_option("--out", out_csv, "CSV output file");
  auto* pois = app.add_subcommand("poisson-check", "Arrival-process sampler checks");
  pois->add_option("--out", out_csv, "CSV output file");
  auto* dump = app.add_subcommand("dump-config", "Print the canonical form of the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed;
  if (*paths_opt) g.paths = paths;

  try {
    if (*run) {
      RunOptions opts;
      opts.out_dir = g.out_dir;
      opts.plots = g.plots;
      opts.parallel = g.parallel;
      opts.paths = g.paths;
      opts.seed = g.seed;
      const auto outcome = run_suite(load(g), opts);
      std::cout << "manifest: " << outcome.manifest_path << '\n';
      for (const auto& o : outcome.experiments) {
        std::cout << (o.ok ? "ok     " : "FAILED ") << o.name << (o.csv ? "  -> " + *o.csv : "") << '\n';
      }
      return outcome.ok ? 0 : 1;
    }
    if (*dump) {
      std::cout << dump_config(load(g));
      return 0;
    }
    if (*asym) return run_asymptotic(g, parse_list_option(x_text));
    const std::optional<std::vector<double>> grid =
        x_text.empty() ? std::nullopt : std::optional(parse_list_option(x_text));
    if (*ruin) return run_type(g, ExperimentType::Ruin, out_csv, std::nullopt);
    if (*ws) return run_type(g, ExperimentType::WeightedSums, out_csv, grid);
    if (*diag) return run_type(g, ExperimentType::DiagnoseDist, out_csv, std::nullopt);
    if (*val) return run_type(g, ExperimentType::ValidateAssumptions, out_csv, std::nullopt);
    if (*pois) return run_type(g, ExperimentType::PoissonCheck, out_csv, std::nullopt);
  } catch (const ConfigError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << g.config << ": " << d.to_string() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ruinlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
