#include "ruinlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ruinlab/detail/overloaded.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/term.hpp"

namespace ruinlab {

std::string ConfigDiagnostic::to_string() const {
  if (line <= 0) return message;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

namespace {

std::string join_diagnostics(const std::vector<ConfigDiagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += d.to_string();
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigDiagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::string to_string(ExperimentType t) {
  switch (t) {
    case ExperimentType::Ruin: return "ruin";
    case ExperimentType::WeightedSums: return "weighted-sums";
    case ExperimentType::DiagnoseDist: return "diagnose-dist";
    case ExperimentType::ValidateAssumptions: return "validate-assumptions";
    case ExperimentType::PoissonCheck: return "poisson-check";
  }
  return "?";
}

std::vector<double> GridSpec::resolve(const TailDistribution& base) const {
  if (!tail_scales) return values;
  std::vector<double> xs;
  xs.reserve(values.size());
  for (double s : values) xs.push_back(base.inverse_tail(s));
  return xs;
}

RuinModel RuinSpec::model() const {
  PremiumModel p = premium_jumps.value_or(PremiumModel{});
  p.rate = premium;
  return RuinModel{dependence, intensity, interest, horizon, p};
}

ExperimentType Experiment::type() const { return static_cast<ExperimentType>(spec.index()); }

std::uint64_t Experiment::paths() const {
  return std::visit(Overloaded{
                        [](const RuinSpec& s) { return s.paths; },
                        [](const WeightedSumsSpec& s) { return s.paths; },
                        [](const DiagnoseSpec&) { return std::uint64_t{0}; },
                        [](const ValidateSpec&) { return std::uint64_t{0}; },
                        [](const PoissonCheckSpec& s) { return s.samples; },
                    },
                    spec);
}

void Experiment::set_paths(std::uint64_t paths) {
  std::visit(Overloaded{
                 [&](RuinSpec& s) { s.paths = paths; },
                 [&](WeightedSumsSpec& s) { s.paths = paths; },
                 [](DiagnoseSpec&) {},
                 [](ValidateSpec&) {},
                 [&](PoissonCheckSpec& s) { s.samples = paths; },
             },
             spec);
}

std::uint64_t ExperimentSuite::experiment_seed(std::size_t index) const {
  const auto& e = experiments.at(index);
  return e.seed_override ? *e.seed_override : derive_seed(seed, index);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int key_column = 0;
  int value_column = 0;
  bool used = false;
};

struct Section {
  ExperimentType type{};
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s, bool allow_dash) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (allow_dash && (c == '-' || c == '.'));
  });
}

std::optional<ExperimentType> parse_type(std::string_view s) {
  for (auto t : {ExperimentType::Ruin, ExperimentType::WeightedSums, ExperimentType::DiagnoseDist,
                 ExperimentType::ValidateAssumptions, ExperimentType::PoissonCheck}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

double parse_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DomainError("expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  const double d = parse_real(s);
  if (!(d >= 0.0 && d <= 9007199254740992.0 && d == std::floor(d))) {
    throw DomainError("expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

class SectionReader {
 public:
  SectionReader(Section& s, std::vector<ConfigDiagnostic>& diags) : s_(s), diags_(diags) {}

  bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

  template <class F>
  auto required(const std::string& key, F&& parse) -> std::optional<decltype(parse(std::string_view{}))> {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) {
      error(s_.line, 1, "missing required key '" + key + "'");
      return std::nullopt;
    }
    return run(key, it->second, parse);
  }

  template <class F, class T>
  auto optional(const std::string& key, F&& parse, T fallback) -> std::optional<decltype(parse(std::string_view{}))> {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    return run(key, it->second, parse);
  }

  /// Reports a constraint violation on an existing key.
  void reject(const std::string& key, const std::string& message) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) {
      error(s_.line, 1, message);
    } else {
      error(it->second.line, it->second.value_column, "key '" + key + "': " + message);
    }
  }

  void error(int line, int column, const std::string& message) {
    diags_.push_back({line, column, "experiment '" + s_.name + "': " + message});
  }

  void finish() {
    for (const auto& [key, e] : s_.entries) {
      if (!e.used) diags_.push_back({e.line, e.key_column, "experiment '" + s_.name + "': unknown key '" + key +
                                                              "' for " + to_string(s_.type) + " experiments"});
    }
  }

  std::optional<GridSpec> grid(bool allow_x = true) {
    const bool scales = has("tail_scales");
    const bool raw = has("x_grid");
    if (scales && raw) {
      reject("x_grid", "give either tail_scales or x_grid, not both");
      s_.entries["x_grid"].used = true;
      s_.entries["tail_scales"].used = true;
      return std::nullopt;
    }
    if (!scales && !(raw && allow_x)) {
      error(s_.line, 1, "missing required key 'tail_scales' (or 'x_grid')");
      return std::nullopt;
    }
    const std::string key = scales ? "tail_scales" : "x_grid";
    auto values = required(key, [](std::string_view v) { return parse_number_list(v); });
    if (!values) return std::nullopt;
    GridSpec g{scales, *values};
    if (g.values.empty()) {
      reject(key, "list must not be empty");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      const double v = g.values[i];
      if (scales && !(v > 0.0 && v < 1.0)) {
        reject(key, "tail scales must lie in (0, 1)");
        return std::nullopt;
      }
      if (!scales && !(v > 0.0)) {
        reject(key, "x values must be > 0");
        return std::nullopt;
      }
      if (i > 0 && (scales ? !(v < g.values[i - 1]) : !(v > g.values[i - 1]))) {
        reject(key, scales ? "tail scales must be strictly decreasing" : "x values must be strictly increasing");
        return std::nullopt;
      }
    }
    return g;
  }

 private:
  template <class F>
  auto run(const std::string& key, Entry& e, F& parse) -> std::optional<decltype(parse(std::string_view{}))> {
    e.used = true;
    try {
      return parse(std::string_view(e.value));
    } catch (const TermError& err) {
      diags_.push_back({e.line, e.value_column + err.column() - 1,
                        "experiment '" + s_.name + "': key '" + key + "': " + err.what()});
    } catch (const Error& err) {
      diags_.push_back({e.line, e.value_column, "experiment '" + s_.name + "': key '" + key + "': " + err.what()});
    }
    return std::nullopt;
  }

  Section& s_;
  std::vector<ConfigDiagnostic>& diags_;
};

auto as_real = [](std::string_view v) { return parse_real(v); };
auto as_count = [](std::string_view v) { return parse_count(v); };
auto as_distribution = [](std::string_view v) { return TailDistribution::parse(v); };
auto as_intensity = [](std::string_view v) { return IntensityModel::parse(v); };

std::optional<DependenceModel> read_dependence(SectionReader& r, const std::optional<TailDistribution>& base) {
  if (!base) {
    if (r.has("dependence")) r.optional("dependence", [](std::string_view) { return 0; }, 0);
    return std::nullopt;
  }
  return r.optional(
      "dependence", [&](std::string_view v) { return DependenceModel::parse(v, *base); },
      DependenceModel::independent(*base));
}

void require_positive(SectionReader& r, const std::string& key, const std::optional<double>& v) {
  if (v && !(*v > 0.0)) r.reject(key, "must be > 0");
}

void require_paths(SectionReader& r, const std::string& key, const std::optional<std::uint64_t>& v) {
  if (v && *v < 1000) r.reject(key, "must be >= 1000");
}

std::optional<RuinSpec> build_ruin(SectionReader& r) {
  auto dist = r.required("distribution", as_distribution);
  auto dep = read_dependence(r, dist);
  auto intensity = r.required("intensity", as_intensity);
  auto interest = r.required("interest", as_real);
  auto horizon = r.required("horizon", as_real);
  auto premium = r.optional("premium", as_real, 0.0);
  std::optional<PremiumModel> jumps;
  bool jumps_ok = true;
  if (r.has("premium_jumps")) {
    auto j = r.required("premium_jumps", [](std::string_view v) { return PremiumModel::parse_jumps(v, 0.0); });
    jumps_ok = j.has_value();
    jumps = j;
  }
  auto grid = r.grid();
  auto paths = r.optional("paths", as_count, std::uint64_t{100000});
  auto est = r.optional("estimator", [](std::string_view v) { return parse_ruin_estimator(trim(v)); },
                        RuinEstimator::SingleBigJump);
  require_positive(r, "interest", interest);
  require_positive(r, "horizon", horizon);
  if (premium && !(*premium >= 0.0)) r.reject("premium", "must be >= 0");
  require_paths(r, "paths", paths);
  if (!(dist && dep && intensity && interest && horizon && premium && jumps_ok && grid && paths && est)) {
    return std::nullopt;
  }
  if (!(*interest > 0.0 && *horizon > 0.0 && *premium >= 0.0 && *paths >= 1000)) return std::nullopt;
  return RuinSpec{*dist, *dep, *intensity, *interest, *horizon, *premium, jumps, *grid, *paths, *est};
}

std::variant<WeightSpec, WeightLattice, KestenSweep> parse_weights(std::string_view text) {
  const Term t = parse_term(text);
  if (t.name == "lattice") {
    t.expect_keys({"n", "lo", "hi", "points"});
    WeightLattice l;
    const double n = t.number("n");
    const double points = t.number("points");
    l.lo = t.number("lo");
    l.hi = t.number("hi");
    if (!(n >= 1 && n == std::floor(n) && n <= 16)) throw TermError("lattice: n must be an integer in [1, 16]", 1);
    if (!(points >= 2 && points == std::floor(points))) throw TermError("lattice: points must be an integer >= 2", 1);
    if (!(l.lo > 0.0 && l.hi > l.lo && std::isfinite(l.hi))) throw TermError("lattice: need 0 < lo < hi", 1);
    l.n = static_cast<std::size_t>(n);
    l.points = static_cast<std::size_t>(points);
    double cells = static_cast<double>(l.n);
    for (std::size_t i = 0; i < l.n; ++i) cells *= static_cast<double>(l.points);
    if (cells > static_cast<double>(kSweepBudget)) {
      throw TermError("lattice: n * points^n = " + format_number(cells) + " exceeds the budget of " +
                          std::to_string(kSweepBudget),
                      1);
    }
    return l;
  }
  if (t.name == "kesten") {
    t.expect_keys({"eps", "n_max"});
    KestenSweep k;
    k.eps = t.number("eps");
    const double n_max = t.number("n_max");
    if (!(k.eps > 0.0 && std::isfinite(k.eps))) throw TermError("kesten: eps must be > 0", 1);
    if (!(n_max >= 1 && n_max == std::floor(n_max) && n_max <= 1000)) {
      throw TermError("kesten: n_max must be an integer in [1, 1000]", 1);
    }
    k.n_max = static_cast<std::size_t>(n_max);
    return k;
  }
  return WeightSpec::from_term(t);
}

std::string weights_to_string(const std::variant<WeightSpec, WeightLattice, KestenSweep>& w) {
  return std::visit(Overloaded{
                        [](const WeightSpec& s) { return s.to_string(); },
                        [](const WeightLattice& l) {
                          return "lattice{n=" + std::to_string(l.n) + ", lo=" + format_number(l.lo) +
                                 ", hi=" + format_number(l.hi) + ", points=" + std::to_string(l.points) + "}";
                        },
                        [](const KestenSweep& k) {
                          return "kesten{eps=" + format_number(k.eps) + ", n_max=" + std::to_string(k.n_max) + "}";
                        },
                    },
                    w);
}

std::optional<WeightedSumsSpec> build_weighted_sums(SectionReader& r) {
  auto dist = r.required("distribution", as_distribution);
  auto dep = read_dependence(r, dist);
  auto weights = r.required("weights", [](std::string_view v) { return parse_weights(v); });
  auto grid = r.grid();
  auto paths = r.optional("paths", as_count, std::uint64_t{100000});
  auto est = r.optional("estimator", [](std::string_view v) { return parse_tail_estimator(trim(v)); },
                        TailEstimator::Auto);
  require_paths(r, "paths", paths);
  if (!(dist && dep && weights && grid && paths && est) || *paths < 1000) return std::nullopt;
  return WeightedSumsSpec{*dist, *dep, *weights, *grid, *paths, *est};
}

std::optional<DiagnoseSpec> build_diagnose(SectionReader& r) {
  auto dist = r.required("distribution", as_distribution);
  auto grid = r.grid();
  auto tol = r.optional("quad_tol", as_real, 1e-9);
  require_positive(r, "quad_tol", tol);
  if (!(dist && grid && tol) || !(*tol > 0.0)) return std::nullopt;
  return DiagnoseSpec{*dist, *grid, *tol};
}

std::optional<ValidateSpec> build_validate(SectionReader& r) {
  auto dist = r.required("distribution", as_distribution);
  auto dep = read_dependence(r, dist);
  auto grid = r.grid();
  if (!(dist && dep && grid)) return std::nullopt;
  const std::string key = grid->key();
  if (grid->values.size() < 2) {
    r.reject(key, "at least two grid points are needed");
    return std::nullopt;
  }
  if (!dist->long_tailed()) {
    r.reject("distribution", "assumption probes need a long-tailed distribution");
    return std::nullopt;
  }
  const auto h = default_insensitivity(*dist);
  for (double x : grid->resolve(*dist)) {
    if (!(x > 2.0 * h(x))) {
      r.reject(key, "grid point x=" + format_number(x) + " does not exceed 2 h(x)");
      return std::nullopt;
    }
  }
  return ValidateSpec{*dist, *dep, *grid};
}

std::optional<PoissonCheckSpec> build_poisson(SectionReader& r) {
  auto intensity = r.required("intensity", as_intensity);
  auto horizon = r.required("horizon", as_real);
  auto n = r.optional("n", as_count, std::uint64_t{3});
  auto samples = r.optional("samples", as_count, std::uint64_t{100000});
  auto cond = r.optional("conditional_samples", as_count, std::uint64_t{10000});
  require_positive(r, "horizon", horizon);
  if (n && *n < 1) r.reject("n", "must be >= 1");
  require_paths(r, "samples", samples);
  if (cond && *cond < 100) r.reject("conditional_samples", "must be >= 100");
  if (!(intensity && horizon && n && samples && cond)) return std::nullopt;
  if (!(*horizon > 0.0 && *n >= 1 && *samples >= 1000 && *cond >= 100)) return std::nullopt;
  if (!(intensity->cumulative(*horizon) > 0.0)) {
    r.reject("intensity", "cumulative intensity over the horizon is 0");
    return std::nullopt;
  }
  return PoissonCheckSpec{*intensity, *horizon, static_cast<std::size_t>(*n), *samples, *cond};
}

}  // namespace

ExperimentSuite parse_config(std::string_view text) {
  std::vector<ConfigDiagnostic> diags;
  std::vector<Section> sections;
  std::map<std::string, Entry> globals;
  std::set<std::string> names;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t\r")) + 1;

    if (line.front() == '[') {
      if (line.back() != ']') {
        diags.push_back({line_no, indent, "section header must end with ']'"});
        continue;
      }
      const std::string_view inner = trim(line.substr(1, line.size() - 2));
      const auto space = inner.find_first_of(" \t");
      if (space == std::string_view::npos) {
        diags.push_back({line_no, indent + 1, "section header must be '[type name]'"});
        continue;
      }
      const std::string_view type_text = inner.substr(0, space);
      const std::string_view name = trim(inner.substr(space));
      const int name_col = indent + 1 + static_cast<int>(inner.size() - name.size());
      const auto type = parse_type(type_text);
      if (!type) {
        diags.push_back({line_no, indent + 1,
                         "unknown experiment type '" + std::string(type_text) +
                             "' (expected ruin, weighted-sums, diagnose-dist, validate-assumptions or poisson-check)"});
      }
      if (!is_identifier(name, true)) {
        diags.push_back({line_no, name_col, "experiment name '" + std::string(name) +
                                                "' must use letters, digits, '_', '-' or '.'"});
      } else if (!names.insert(std::string(name)).second) {
        diags.push_back({line_no, name_col, "duplicate experiment name '" + std::string(name) + "'"});
      }
      Section s;
      s.type = type.value_or(ExperimentType::Ruin);
      s.name = std::string(name);
      s.line = line_no;
      sections.push_back(std::move(s));
      if (!type) sections.back().line = -1;  // skip semantic checks
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      diags.push_back({line_no, indent, "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value_raw = line.substr(eq + 1);
    const std::string_view value = trim(value_raw);
    const int value_col = indent + static_cast<int>(eq) + 1 + static_cast<int>(value_raw.find_first_not_of(" \t"));
    if (!is_identifier(key, false)) {
      diags.push_back({line_no, indent, "invalid key '" + key + "'"});
      continue;
    }
    if (value.empty()) {
      diags.push_back({line_no, value_col, "key '" + key + "' has no value"});
      continue;
    }
    auto& target = sections.empty() ? globals : sections.back().entries;
    if (target.count(key)) {
      diags.push_back({line_no, indent, "duplicate key '" + key + "'"});
      continue;
    }
    target[key] = Entry{std::string(value), line_no, indent, value_col, false};
  }

  ExperimentSuite suite;
  for (auto& [key, e] : globals) {
    try {
      if (key == "seed") {
        suite.seed = parse_count(e.value);
      } else if (key == "out_dir") {
        suite.out_dir = e.value;
      } else {
        diags.push_back({e.line, e.key_column, "unknown global key '" + key + "' (expected seed or out_dir)"});
      }
    } catch (const Error& err) {
      diags.push_back({e.line, e.value_column, "key '" + key + "': " + err.what()});
    }
  }

  for (auto& s : sections) {
    if (s.line < 0) continue;
    SectionReader r(s, diags);
    std::optional<std::uint64_t> seed_override;
    if (r.has("seed")) {
      auto seed = r.required("seed", as_count);
      if (seed) seed_override = *seed;
    }
    std::optional<decltype(Experiment::spec)> spec;
    switch (s.type) {
      case ExperimentType::Ruin:
        if (auto v = build_ruin(r)) spec.emplace(std::move(*v));
        break;
      case ExperimentType::WeightedSums:
        if (auto v = build_weighted_sums(r)) spec.emplace(std::move(*v));
        break;
      case ExperimentType::DiagnoseDist:
        if (auto v = build_diagnose(r)) spec.emplace(std::move(*v));
        break;
      case ExperimentType::ValidateAssumptions:
        if (auto v = build_validate(r)) spec.emplace(std::move(*v));
        break;
      case ExperimentType::PoissonCheck:
        if (auto v = build_poisson(r)) spec.emplace(std::move(*v));
        break;
    }
    r.finish();
    if (spec) suite.experiments.push_back(Experiment{s.name, s.line, seed_override, std::move(*spec)});
  }

  if (sections.empty()) diags.push_back({0, 0, "suite must contain ≥1 experiment"});
  if (!diags.empty()) {
    std::stable_sort(diags.begin(), diags.end(), [](const auto& a, const auto& b) {
      return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    throw ConfigError(std::move(diags));
  }
  return suite;
}

ExperimentSuite parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({{0, 0, "cannot read config file '" + path + "'"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

void put(std::string& out, std::string_view key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

void put_grid(std::string& out, const GridSpec& g) { put(out, g.key(), format_list(g.values)); }

}  // namespace

std::string dump_config(const ExperimentSuite& suite) {
  std::string out;
  put(out, "seed", std::to_string(suite.seed));
  put(out, "out_dir", suite.out_dir);
  for (const auto& e : suite.experiments) {
    out += "\n[" + to_string(e.type()) + " " + e.name + "]\n";
    if (e.seed_override) put(out, "seed", std::to_string(*e.seed_override));
    std::visit(Overloaded{
                   [&](const RuinSpec& s) {
                     put(out, "distribution", s.distribution.to_string());
                     put(out, "dependence", s.dependence.to_string());
                     put(out, "intensity", s.intensity.to_string());
                     put(out, "interest", format_number(s.interest));
                     put(out, "horizon", format_number(s.horizon));
                     put(out, "premium", format_number(s.premium));
                     if (s.premium_jumps) put(out, "premium_jumps", s.premium_jumps->jumps_to_string());
                     put_grid(out, s.grid);
                     put(out, "paths", std::to_string(s.paths));
                     put(out, "estimator", to_string(s.estimator));
                   },
                   [&](const WeightedSumsSpec& s) {
                     put(out, "distribution", s.distribution.to_string());
                     put(out, "dependence", s.dependence.to_string());
                     put(out, "weights", weights_to_string(s.weights));
                     put_grid(out, s.grid);
                     put(out, "paths", std::to_string(s.paths));
                     put(out, "estimator", to_string(s.estimator));
                   },
                   [&](const DiagnoseSpec& s) {
                     put(out, "distribution", s.distribution.to_string());
                     put_grid(out, s.grid);
                     put(out, "quad_tol", format_number(s.quad_tol));
                   },
                   [&](const ValidateSpec& s) {
                     put(out, "distribution", s.distribution.to_string());
                     put(out, "dependence", s.dependence.to_string());
                     put_grid(out, s.grid);
                   },
                   [&](const PoissonCheckSpec& s) {
                     put(out, "intensity", s.intensity.to_string());
                     put(out, "horizon", format_number(s.horizon));
                     put(out, "n", std::to_string(s.n));
                     put(out, "samples", std::to_string(s.samples));
                     put(out, "conditional_samples", std::to_string(s.conditional_samples));
                   },
               },
               e.spec);
  }
  return out;
}

}  // namespace ruinlab
