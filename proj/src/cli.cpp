#include "strip/cli.hpp"

#include "strip/errors.hpp"
#include "strip/green.hpp"
#include "strip/ids.hpp"
#include "strip/lyapunov.hpp"
#include "strip/parallel.hpp"
#include "strip/regularity.hpp"
#include "strip/thouless.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace strip::cli {

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

/// Header row plus string cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string s;
    const auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
      }
      s += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError("CSV has no column '" + name + "'");
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }

  std::vector<double> numbers(std::size_t col) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(r.at(col), &used));
        if (used != r[col].size()) throw std::invalid_argument(r[col]);
      } catch (const std::exception&) {
        throw ConfigError("non-numeric CSV cell in column '" + header[col] + "'");
      }
    }
    return out;
  }
};

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.find('"') != std::string::npos) throw ConfigError("quoted CSV fields are not supported");
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << content;
  if (!f) throw ConfigError("write failed for " + path);
}

Table parse_csv(const std::string& text, const std::string& origin) {
  Table t;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw ConfigError(origin + " is empty");
  t.header = split_csv_line(line);
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    t.rows.push_back(split_csv_line(line));
    if (t.rows.back().size() != t.header.size()) throw ConfigError(origin + ": ragged CSV row");
  }
  return t;
}

Table read_csv(const std::string& path) { return parse_csv(read_file(path), path); }

/// Options shared by the computational subcommands.
struct Common {
  std::string model_path;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
};

/// Energy grid from --energy values or --emin/--emax/--esteps.
struct Grid {
  std::vector<double> energy;
  double emin = 0.0;
  double emax = 0.0;
  int esteps = 0;

  void add_options(CLI::App* sub) {
    sub->add_option("--energy", energy, "Explicit energies (repeatable)");
    sub->add_option("--emin", emin, "Lowest grid energy");
    sub->add_option("--emax", emax, "Highest grid energy");
    sub->add_option("--esteps", esteps, "Number of grid points")->check(CLI::PositiveNumber);
  }

  std::vector<double> values() const {
    if (!energy.empty()) {
      if (esteps != 0) throw ConfigError("use either --energy or --emin/--emax/--esteps");
      return energy;
    }
    if (esteps == 0) throw ConfigError("no energies: pass --energy or --emin/--emax/--esteps");
    if (esteps == 1) return {emin};
    if (!(emax > emin)) throw ConfigError("--emax must exceed --emin");
    return uniform_grid(emin, emax, esteps);
  }
};

/// Per-invocation state: parsed options, outputs, timing.
class Run {
 public:
  Run(std::vector<std::string> argv, std::ostream& out, std::ostream& err)
      : argv_(std::move(argv)), out_(out), err_(err), start_(std::chrono::steady_clock::now()) {}

  std::ostream& err() { return err_; }

  void set_subcommand(const CLI::App* sub) {
    subcommand_ = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "help") continue;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        parameters_[name] = r.size() == 1 ? json(r.front()) : json(r);
      } else if (!opt->get_default_str().empty() && opt->get_default_str() != "{}") {
        parameters_[name] = opt->get_default_str();
      }
    }
  }

  void note(const std::string& key, json value) { extra_[key] = std::move(value); }

  /// Writes `content` to `path`, or to the output stream when path is empty.
  void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
      out_ << content;
      return;
    }
    write_file(path, content);
    outputs_.push_back(path);
  }

  void finish(std::uint64_t seed, bool has_seed) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["subcommand"] = subcommand_;
    m["argv"] = argv_;
    m["parameters"] = parameters_;
    m["seed"] = has_seed ? json(seed) : json(nullptr);
    m["version"] = STRIP_ANDERSON_VERSION;
    m["outputs"] = outputs_;
    m["wall_time_seconds"] = wall;
    for (const auto& [k, v] : extra_.items()) m[k] = v;
    for (const auto& path : outputs_) write_file(path + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  std::vector<std::string> argv_;
  std::ostream& out_;
  std::ostream& err_;
  std::chrono::steady_clock::time_point start_;
  std::string subcommand_;
  json parameters_ = json::object();
  json extra_ = json::object();
  std::vector<std::string> outputs_;
};

DisorderSpec load_spec(const Common& c, Run& run) {
  const DisorderSpec spec = c.model_path.empty() ? model2_preset() : load_model_file(c.model_path);
  spec.validate();
  run.note("model", model_to_json(spec));
  return spec;
}

void add_common(CLI::App* sub, Common& c, bool with_model = true, bool with_seed = true) {
  if (with_model) sub->add_option("--model", c.model_path, "Model JSON file (default: two-string preset)");
  if (with_seed) sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads (default: STRIP_ANDERSON_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--out", c.out, "Output path (default: standard output)");
}

// ---------------------------------------------------------------- lyapunov

struct LyapunovArgs {
  Common common;
  Grid grid;
  std::int64_t cells = 100000;
  int renorm_period = 1;
};

void lyapunov_command(const LyapunovArgs& a, Run& run) {
  const DisorderSpec spec = load_spec(a.common, run);
  const auto energies = a.grid.values();
  const auto spectra = parallel_map(
      energies.size(),
      [&](std::size_t i) { return lyapunov_spectrum(spec, energies[i], a.cells, a.common.seed, a.renorm_period); },
      a.common.threads);
  const int n2 = 2 * spec.channels;
  Table t;
  t.header.push_back("energy");
  for (int k = 1; k <= n2; ++k) t.header.push_back("gamma_" + std::to_string(k));
  for (int k = 1; k <= n2; ++k) t.header.push_back("se_" + std::to_string(k));
  t.header.insert(t.header.end(), {"cells", "seed"});
  std::vector<int> periods;
  for (const auto& s : spectra) {
    std::vector<std::string> row{fmt(s.energy)};
    for (double g : s.exponents) row.push_back(fmt(g));
    for (double e : s.standard_errors) row.push_back(fmt(e));
    row.push_back(fmt(s.cells_used));
    row.push_back(fmt(s.seed));
    t.rows.push_back(std::move(row));
    periods.push_back(s.renorm_period);
  }
  run.note("renorm_periods_used", periods);
  run.emit(a.common.out, t.csv());
}

// ---------------------------------------------------------------- ids

struct IdsArgs {
  Common common;
  Grid grid;
  int box_length = 100;
  double mesh = 0.01;
  std::string boundary = "dirichlet";
  std::string cache_dir;
};

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void ids_command(const IdsArgs& a, Run& run) {
  const DisorderSpec spec = load_spec(a.common, run);
  const Boundary boundary = parse_boundary(a.boundary);
  const auto energies = a.grid.values();

  std::string cache_dir = a.cache_dir;
  if (cache_dir.empty())
    if (const char* env = std::getenv("STRIP_ANDERSON_CACHE_DIR")) cache_dir = env;
  std::string cached_csv, key_text, cache_path;
  if (!cache_dir.empty()) {
    json key;
    key["model"] = model_to_json(spec);
    key["box_length"] = a.box_length;
    key["mesh"] = a.mesh;
    key["boundary"] = to_string(boundary);
    key["energies"] = energies;
    key["seed"] = a.common.seed;
    key_text = key.dump();
    cache_path = (std::filesystem::path(cache_dir) / ("ids-" + hex(fnv1a(key_text)))).string();
    std::error_code ec;
    if (std::filesystem::exists(cache_path + ".csv", ec) && std::filesystem::exists(cache_path + ".key.json", ec) &&
        read_file(cache_path + ".key.json") == key_text)
      cached_csv = read_file(cache_path + ".csv");
    run.note("cache_key", hex(fnv1a(key_text)));
  }
  run.note("cache_hit", !cached_csv.empty());
  if (!cached_csv.empty()) {
    run.emit(a.common.out, cached_csv);
    return;
  }

  const IdsTable table = ids_table(spec, a.common.seed, a.box_length, a.mesh, energies, boundary, a.common.threads);
  Table t;
  t.header = {"energy", "ids", "box_length", "mesh", "boundary", "seed"};
  for (std::size_t i = 0; i < table.energies.size(); ++i)
    t.rows.push_back({fmt(table.energies[i]), fmt(table.ids[i]), fmt(table.box_length), fmt(table.mesh),
                      to_string(table.boundary), fmt(table.seed)});
  run.note("perturbed_energies", table.perturbed_energies);
  const std::string csv = t.csv();
  if (!cache_path.empty()) {
    std::filesystem::create_directories(cache_dir);
    write_file(cache_path + ".csv", csv);
    write_file(cache_path + ".key.json", key_text);
  }
  run.emit(a.common.out, csv);
}

/// Loads an ids CSV written by the ids subcommand.
IdsTable load_ids_table(const std::string& path, int channels) {
  const Table t = read_csv(path);
  if (t.rows.empty()) throw ConfigError(path + " has no rows");
  IdsTable table;
  table.energies = t.numbers(t.column("energy"));
  table.ids = t.numbers(t.column("ids"));
  table.channels = channels;
  if (auto c = t.find("box_length")) table.box_length = static_cast<int>(t.numbers(*c).front());
  if (auto c = t.find("mesh")) table.mesh = t.numbers(*c).front();
  if (auto c = t.find("boundary")) table.boundary = parse_boundary(t.rows.front()[*c]);
  for (std::size_t i = 1; i < table.energies.size(); ++i)
    if (!(table.energies[i] > table.energies[i - 1])) throw ConfigError(path + ": energies must increase");
  return table;
}

// ---------------------------------------------------------------- fk-laplace

struct FkArgs {
  Common common;
  std::vector<double> t;
  std::int64_t paths = 10000;
  double time_step = 0.0;
  std::string ids_path;
};

void fk_command(const FkArgs& a, Run& run) {
  const DisorderSpec spec = load_spec(a.common, run);
  if (a.t.empty()) throw ConfigError("pass at least one --t");
  std::optional<IdsTable> table;
  if (!a.ids_path.empty()) table = load_ids_table(a.ids_path, spec.channels);
  Table out;
  out.header = {"t", "value", "se", "paths", "time_step"};
  if (table) out.header.push_back("ids_laplace");
  for (double t : a.t) {
    const double dt = a.time_step > 0.0 ? a.time_step : t / 100.0;
    const auto est = feynman_kac_laplace(spec, t, a.paths, dt, a.common.seed, a.common.threads);
    std::vector<std::string> row{fmt(est.t), fmt(est.value), fmt(est.mc_standard_error), fmt(est.paths),
                                 fmt(est.time_step)};
    if (table) row.push_back(fmt(laplace_of_ids(*table, t)));
    out.rows.push_back(std::move(row));
  }
  run.emit(a.common.out, out.csv());
}

// ---------------------------------------------------------------- wfunc

struct WArgs {
  Common common;
  Grid grid;
  std::vector<double> heights;
  int window = 50;
  int realizations = 200;
  int window_cells = 100;
  double derivative_step = 0.0;
  std::string summary;
};

void w_command(const WArgs& a, Run& run) {
  const DisorderSpec spec = load_spec(a.common, run);
  const auto energies = a.grid.values();
  const std::vector<double> heights = a.heights.empty() ? default_limit_heights() : a.heights;
  WOptions options;
  options.window_cells = a.window_cells;
  options.derivative_step = a.derivative_step;
  options.threads = a.common.threads;
  Table t;
  t.header = {"e", "a", "re_w", "im_w", "se_re", "se_im", "re_trG", "im_trG", "L_w", "realizations"};
  json limits = json::array();
  for (double e : energies) {
    std::vector<double> re, im, re_g, im_g;
    for (double h : heights) {
      const WValue v = w_estimate(spec, Complex(e, h), a.window, a.realizations, a.common.seed, options);
      t.rows.push_back({fmt(e), fmt(h), fmt(v.w.real()), fmt(v.w.imag()), fmt(v.se_re_w), fmt(v.se_im_w),
                        fmt(v.green_trace.real()), fmt(v.green_trace.imag()), fmt(v.truncation_length),
                        fmt(v.realizations)});
      re.push_back(v.w.real());
      im.push_back(v.w.imag());
      re_g.push_back(v.green_trace.real());
      im_g.push_back(v.green_trace.imag());
    }
    if (heights.size() >= 2)
      limits.push_back({{"e", e},
                        {"re_w", extrapolate_to_zero(heights, re)},
                        {"im_w", extrapolate_to_zero(heights, im)},
                        {"re_trG", extrapolate_to_zero(heights, re_g)},
                        {"im_trG", extrapolate_to_zero(heights, im_g)}});
  }
  run.emit(a.common.out, t.csv());
  if (!a.summary.empty()) {
    json s;
    s["heights"] = heights;
    s["limits"] = limits;
    run.emit(a.summary, s.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------- thouless

struct ThoulessArgs {
  Common common;
  std::string ids_path;
  std::string gamma_path;
  std::string csv_path;
  std::optional<double> rew_i;
  int realizations = 200;
  int window = 50;
};

/// Energies and gamma_1 + ... + gamma_N from a lyapunov CSV; N is half the
/// number of gamma_k columns.
std::pair<std::vector<double>, std::vector<double>> load_gamma_sums(const Table& t, int& channels) {
  int count = 0;
  while (t.find("gamma_" + std::to_string(count + 1))) ++count;
  if (count == 0 || count % 2 != 0) throw ConfigError("gamma CSV needs columns gamma_1 .. gamma_2N");
  channels = count / 2;
  const auto energies = t.numbers(t.column("energy"));
  std::vector<double> sums(energies.size(), 0.0);
  for (int k = 1; k <= channels; ++k) {
    const auto g = t.numbers(t.column("gamma_" + std::to_string(k)));
    for (std::size_t i = 0; i < g.size(); ++i) sums[i] += g[i];
  }
  return {energies, sums};
}

void thouless_command(const ThoulessArgs& a, Run& run) {
  int channels = 0;
  const auto [energies, sums] = load_gamma_sums(read_csv(a.gamma_path), channels);
  const IdsTable table = load_ids_table(a.ids_path, channels);
  const ThoulessFit fit = thouless_fit(energies, sums, table);

  std::optional<double> rew_i = a.rew_i;
  if (!rew_i && !a.common.model_path.empty()) {
    const DisorderSpec spec = load_spec(a.common, run);
    if (spec.channels != channels) throw ConfigError("model channel count differs from the gamma CSV");
    WOptions options;
    options.threads = a.common.threads;
    rew_i = w_estimate(spec, Complex(0.0, 1.0), a.window, a.realizations, a.common.seed, options).w.real();
  }

  json s;
  s["alpha"] = fit.alpha;
  s["rms"] = fit.rms;
  s["alpha_vs_rew_i"] = rew_i ? json(fit.alpha - *rew_i) : json(nullptr);
  s["re_w_i"] = rew_i ? json(*rew_i) : json(nullptr);
  s["channels"] = channels;
  s["energies"] = fit.energies.size();
  run.emit(a.common.out, s.dump(2) + "\n");

  if (!a.csv_path.empty()) {
    Table t;
    t.header = {"energy", "gamma_sum", "thouless_rhs", "residual"};
    for (std::size_t i = 0; i < fit.energies.size(); ++i)
      t.rows.push_back({fmt(fit.energies[i]), fmt(fit.gamma_sums[i]), fmt(fit.rhs[i]), fmt(fit.residuals[i])});
    run.emit(a.csv_path, t.csv());
  }
}

// ---------------------------------------------------------------- hoelder

struct HoelderArgs {
  Common common;
  std::string input;
  std::string column = "ids";
};

void hoelder_command(const HoelderArgs& a, Run& run) {
  const Table t = read_csv(a.input);
  const auto energy_col = t.find("energy") ? t.find("energy") : t.find("e");
  if (!energy_col) throw ConfigError(a.input + " has no energy column");
  const auto energies = t.numbers(*energy_col);
  std::vector<double> values;
  if (a.column == "gamma_sum" && !t.find("gamma_sum")) {
    int channels = 0;
    values = load_gamma_sums(t, channels).second;
  } else {
    values = t.numbers(t.column(a.column));
  }
  if (energies.size() < 2) throw DomainError("need at least two samples");
  const double step = (energies.back() - energies.front()) / static_cast<double>(energies.size() - 1);
  for (std::size_t i = 1; i < energies.size(); ++i)
    if (std::abs(energies[i] - energies[i - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
      throw DomainError("Hoelder fit needs a uniform energy grid");
  const HoelderEstimate h = hoelder_exponent(values, step);
  json s;
  s["column"] = a.column;
  s["samples"] = values.size();
  s["step"] = step;
  s["alpha"] = h.alpha;
  s["constant"] = h.constant;
  s["r2"] = h.r2;
  s["slope"] = h.slope;
  s["clamped"] = h.clamped;
  s["undefined"] = h.undefined;
  s["first_scale"] = h.first_scale;
  s["last_scale"] = h.last_scale;
  s["lags"] = h.lags;
  s["increments"] = h.increments;
  run.emit(a.common.out, s.dump(2) + "\n");
}

// ---------------------------------------------------------------- rank

struct RankArgs {
  Common common;
  Grid grid;
  int max_power = 10000;
  double tolerance = 1e-8;
};

void rank_command(const RankArgs& a, Run& run) {
  const DisorderSpec spec = load_spec(a.common, run);
  const auto energies = a.grid.values();
  const auto reports = parallel_map(
      energies.size(),
      [&](std::size_t i) { return lie_algebra_rank(spec, energies[i], a.max_power, a.tolerance, a.common.seed); },
      a.common.threads);
  Table t;
  t.header = {"energy", "rank", "n_generators", "min_power_used"};
  for (const auto& r : reports) {
    int min_power = 0;
    for (const auto& g : r.generators) min_power = min_power == 0 ? g.power : std::min(min_power, g.power);
    t.rows.push_back({fmt(r.energy), fmt(r.rank), fmt(static_cast<int>(r.generators.size())), fmt(min_power)});
  }
  if (!reports.empty()) run.note("target_rank", reports.front().target);
  run.emit(a.common.out, t.csv());
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  Common common;
  double lo = 0.0;
  double hi = 0.0;
  int samples = 1000;
};

void bounds_command(const BoundsArgs& a, Run& run) {
  const DisorderSpec spec = load_spec(a.common, run);
  const BoundsReport r = check_bounds(spec, a.lo, a.hi, a.samples, a.common.seed);
  json s;
  s["c1"] = r.constants.c1;
  s["c2"] = r.constants.c2;
  s["c3"] = r.constants.c3;
  s["lo"] = r.constants.lo;
  s["hi"] = r.constants.hi;
  s["samples"] = r.samples;
  s["max_growth_ratio"] = r.max_growth_ratio;
  s["max_lipschitz_ratio"] = r.max_lipschitz_ratio;
  run.emit(a.common.out, s.dump(2) + "\n");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral statistics of random Schroedinger operators on strips", "strip_anderson"};
  app.set_version_flag("--version", STRIP_ANDERSON_VERSION);
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  LyapunovArgs lyap;
  auto* c_lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum over an energy grid");
  add_common(c_lyap, lyap.common);
  lyap.grid.add_options(c_lyap);
  c_lyap->add_option("--cells", lyap.cells, "Cells per energy")->check(CLI::PositiveNumber);
  c_lyap->add_option("--renorm-period", lyap.renorm_period, "Cells between QR steps")->check(CLI::PositiveNumber);

  IdsArgs ids;
  auto* c_ids = app.add_subcommand("ids", "Integrated density of states by eigenvalue counting");
  add_common(c_ids, ids.common);
  ids.grid.add_options(c_ids);
  c_ids->add_option("--box-length", ids.box_length, "Half-width L of the box (-L, L)");
  c_ids->add_option("--mesh", ids.mesh, "Finite-difference mesh h (1/h integer)");
  c_ids->add_option("--boundary", ids.boundary, "dirichlet or neumann");
  c_ids->add_option("--cache-dir", ids.cache_dir, "Directory for cached tables (or STRIP_ANDERSON_CACHE_DIR)");

  FkArgs fk;
  auto* c_fk = app.add_subcommand("fk-laplace", "Laplace transform of the IDS by Feynman-Kac Monte Carlo");
  add_common(c_fk, fk.common);
  c_fk->add_option("--t", fk.t, "Times (repeatable)")->required();
  c_fk->add_option("--paths", fk.paths, "Brownian bridges per time")->check(CLI::PositiveNumber);
  c_fk->add_option("--time-step", fk.time_step, "Bridge time step (default t/100)");
  c_fk->add_option("--ids", fk.ids_path, "IDS CSV to compare against");

  WArgs w;
  auto* c_w = app.add_subcommand("wfunc", "Averaged m-functions w(E + ia)");
  add_common(c_w, w.common);
  w.grid.add_options(c_w);
  c_w->add_option("--a", w.heights, "Imaginary parts (repeatable; default 0.4 0.2 0.1 0.05)");
  c_w->add_option("--window", w.window, "Truncation length L_w in cells");
  c_w->add_option("--realizations", w.realizations, "Independent realizations")->check(CLI::PositiveNumber);
  c_w->add_option("--window-cells", w.window_cells, "Cells of positions averaged per realization");
  c_w->add_option("--derivative-step", w.derivative_step, "Step for w'(z); 0 disables");
  c_w->add_option("--summary", w.summary, "JSON file with a -> 0 extrapolations");

  ThoulessArgs th;
  auto* c_th = app.add_subcommand("thouless", "Fit of the Thouless formula");
  add_common(c_th, th.common);
  c_th->add_option("--ids", th.ids_path, "IDS CSV")->required();
  c_th->add_option("--gamma", th.gamma_path, "Lyapunov CSV")->required();
  c_th->add_option("--csv", th.csv_path, "Per-energy residual CSV");
  c_th->add_option("--rew-i", th.rew_i, "Known Re w(i) for the cross-check");
  c_th->add_option("--realizations", th.realizations, "Realizations for Re w(i) when --model is given");
  c_th->add_option("--window", th.window, "L_w for Re w(i) when --model is given");

  HoelderArgs ho;
  auto* c_ho = app.add_subcommand("hoelder", "Empirical Hoelder exponent of a sampled function");
  add_common(c_ho, ho.common, false, false);
  c_ho->add_option("--input", ho.input, "CSV with an energy column")->required();
  c_ho->add_option("--column", ho.column, "Column to analyse (gamma_sum sums the top half of gamma_k)");

  RankArgs rk;
  auto* c_rk = app.add_subcommand("rank", "Lie-algebra rank of near-identity transfer powers");
  add_common(c_rk, rk.common);
  rk.grid.add_options(c_rk);
  c_rk->add_option("--max-power", rk.max_power, "Largest power searched");
  c_rk->add_option("--tolerance", rk.tolerance, "Relative singular-value threshold");

  BoundsArgs bd;
  auto* c_bd = app.add_subcommand("bounds", "Check the a-priori transfer-matrix bounds");
  add_common(c_bd, bd.common);
  c_bd->add_option("--lo", bd.lo, "Interval start")->required();
  c_bd->add_option("--hi", bd.hi, "Interval end")->required();
  c_bd->add_option("--samples", bd.samples, "Sampled cells and energy pairs");

  std::vector<std::string> argv{"strip_anderson"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> raw;
  for (const auto& s : argv) raw.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kParameterError;
  }

  Run run(args, out, err);
  try {
    CLI::App* sub = app.get_subcommands().front();
    run.set_subcommand(sub);
    std::uint64_t seed = 0;
    bool has_seed = true;
    if (sub == c_lyap) {
      lyapunov_command(lyap, run);
      seed = lyap.common.seed;
    } else if (sub == c_ids) {
      ids_command(ids, run);
      seed = ids.common.seed;
    } else if (sub == c_fk) {
      fk_command(fk, run);
      seed = fk.common.seed;
    } else if (sub == c_w) {
      w_command(w, run);
      seed = w.common.seed;
    } else if (sub == c_th) {
      thouless_command(th, run);
      seed = th.common.seed;
      has_seed = !th.common.model_path.empty() && !th.rew_i;
    } else if (sub == c_ho) {
      hoelder_command(ho, run);
      has_seed = false;
    } else if (sub == c_rk) {
      rank_command(rk, run);
      seed = rk.common.seed;
    } else {
      bounds_command(bd, run);
      seed = bd.common.seed;
    }
    run.finish(seed, has_seed);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const ConfigError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const DomainError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const StatisticsError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const nlohmann::json::exception& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
  return kOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace strip::cli
