#ifndef KELLER_TOOLS_CLI_HPP
#define KELLER_TOOLS_CLI_HPP

// Command-line front end: flag/JSON configuration, the seven subcommands, and
// report emission. parse() and run() are split so tests can drive both.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "keller/corpus.hpp"
#include "keller/grid.hpp"
#include "keller/groundstate.hpp"
#include "keller/hessian.hpp"
#include "keller/holder_fuzz.hpp"
#include "keller/io.hpp"
#include "keller/spectral.hpp"
#include "keller/stability.hpp"

namespace keller::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;

class ConfigError : public Error {
public:
  using Error::Error;
};

inline const std::vector<std::string> &commands() {
  static const std::vector<std::string> c{"ground-state", "constants",       "eigen",      "holder-verify",
                                          "hessian",      "stability-sweep", "convergence"};
  return c;
}

struct RunConfig {
  std::string command;
  std::optional<double> gamma;
  std::optional<double> q;
  std::optional<double> p; ///< holder-verify: a single exponent instead of the default set
  int d = 1;
  std::optional<double> grid_l;
  std::optional<std::size_t> grid_n;
  double tol = groundstate::kDefaultTol;
  std::uint64_t seed = 0;
  std::optional<long> samples;
  std::string out;
  std::optional<std::string> format;
  std::string potential;

  /// Exponents from whichever of gamma / q was given.
  groundstate::Exponents exponents() const {
    if (gamma)
      return groundstate::exponents_from_gamma(*gamma, d);
    if (q)
      return groundstate::exponents_from_q(*q, d);
    throw ConfigError(command + ": one of --gamma or --q is required");
  }
};

namespace detail {

inline bool needs_exponent(const std::string &c) {
  return c == "ground-state" || c == "constants" || c == "hessian" || c == "stability-sweep";
}

/// Fills every option that was not given on the command line from the JSON
/// config; keys are the long flag names without the dashes.
inline void apply_json(RunConfig &cfg, const json &j, const std::map<std::string, bool> &given) {
  if (!j.is_object())
    throw ConfigError("config: top level must be an object");
  auto take = [&](const std::string &key) { return j.contains(key) && !given.at(key); };
  static const std::vector<std::string> known{"command", "gamma", "q",   "p",   "d",      "grid-l",   "grid-n",
                                              "tol",     "seed",  "samples", "out", "format", "potential"};
  for (const auto &[key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("config: unknown key '" + key + "'");
  try {
    if (j.contains("command") && cfg.command.empty())
      cfg.command = j.at("command").get<std::string>();
    if (take("gamma"))
      cfg.gamma = j.at("gamma").get<double>();
    if (take("q"))
      cfg.q = j.at("q").get<double>();
    if (take("p"))
      cfg.p = j.at("p").get<double>();
    if (take("d"))
      cfg.d = j.at("d").get<int>();
    if (take("grid-l"))
      cfg.grid_l = j.at("grid-l").get<double>();
    if (take("grid-n"))
      cfg.grid_n = j.at("grid-n").get<std::size_t>();
    if (take("tol"))
      cfg.tol = j.at("tol").get<double>();
    if (take("seed"))
      cfg.seed = j.at("seed").get<std::uint64_t>();
    if (take("samples"))
      cfg.samples = j.at("samples").get<long>();
    if (take("out"))
      cfg.out = j.at("out").get<std::string>();
    if (take("format"))
      cfg.format = j.at("format").get<std::string>();
    if (take("potential"))
      cfg.potential = j.at("potential").get<std::string>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline void validate(const RunConfig &cfg) {
  if (std::find(commands().begin(), commands().end(), cfg.command) == commands().end())
    throw ConfigError("unknown command '" + cfg.command + "'");
  if (cfg.gamma && cfg.q)
    throw ConfigError("give exactly one of --gamma and --q");
  if (cfg.d < 1 || cfg.d > 3)
    throw ConfigError("--d must be 1, 2 or 3");
  if (needs_exponent(cfg.command))
    cfg.exponents(); // throws on missing or out-of-range exponents
  else if (cfg.gamma || cfg.q)
    cfg.exponents();
  if (cfg.grid_l && !(*cfg.grid_l > 0.0 && std::isfinite(*cfg.grid_l)))
    throw ConfigError("--grid-l must be positive");
  if (cfg.grid_n && *cfg.grid_n < Grid::kMinNodes)
    throw ConfigError("--grid-n must be at least 16");
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0))
    throw ConfigError("--tol must lie in (0, 1)");
  if (cfg.samples && *cfg.samples < 1)
    throw ConfigError("--samples must be positive");
  if (cfg.format && *cfg.format != "csv" && *cfg.format != "json")
    throw ConfigError("--format must be csv or json");
  if (cfg.p && !(*cfg.p >= 2.0 && std::isfinite(*cfg.p)))
    throw ConfigError("--p must be a finite exponent >= 2");
  if (cfg.command == "eigen" && cfg.potential.empty())
    throw ConfigError("eigen: --potential is required");
}

} // namespace detail

/// Parses argv (argv[0] is the program name). Throws ConfigError on any
/// invalid input and CLI::Success for --help (message in `help`).
inline RunConfig parse(const std::vector<std::string> &args, std::string *help = nullptr) {
  RunConfig cfg;
  CLI::App app{"Keller optimal potentials, sharp GNS constants and stability diagnostics", "keller"};
  app.require_subcommand(0, 1);
  std::string config_path;
  double gamma = 0, q = 0, p = 0, grid_l = 0;
  std::size_t grid_n = 0;
  long samples = 0;
  std::string format;

  std::map<std::string, CLI::Option *> opts;
  auto add_common = [&](CLI::App *sub) {
    opts["gamma"] = sub->add_option("--gamma", gamma, "eigenvalue exponent gamma");
    opts["q"] = sub->add_option("--q", q, "GNS exponent q");
    opts["p"] = sub->add_option("--p", p, "Hoelder exponent (holder-verify)");
    opts["d"] = sub->add_option("--d", cfg.d, "dimension (1..3)");
    opts["grid-l"] = sub->add_option("--grid-l", grid_l, "domain extent L");
    opts["grid-n"] = sub->add_option("--grid-n", grid_n, "number of cells");
    opts["tol"] = sub->add_option("--tol", cfg.tol, "solver tolerance");
    opts["seed"] = sub->add_option("--seed", cfg.seed, "random seed");
    opts["samples"] = sub->add_option("--samples", samples, "sample count");
    opts["out"] = sub->add_option("--out", cfg.out, "output path");
    opts["format"] = sub->add_option("--format", format, "csv or json");
    opts["potential"] = sub->add_option("--potential", cfg.potential, "two-column potential CSV");
    sub->add_option("--config", config_path, "JSON file with the same keys as the flags");
  };
  app.add_option("--config", config_path, "JSON file naming the command and its options");
  std::vector<CLI::App *> subs;
  for (const auto &c : commands()) {
    CLI::App *sub = app.add_subcommand(c, c);
    add_common(sub);
    subs.push_back(sub);
  }

  std::vector<std::string> rev(args.rbegin(), args.empty() ? args.rend() : args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp &e) {
    if (help)
      *help = app.help();
    throw;
  } catch (const CLI::ParseError &e) {
    throw ConfigError(e.what());
  }

  std::map<std::string, bool> given;
  for (CLI::App *sub : subs)
    if (sub->parsed()) {
      cfg.command = sub->get_name();
      for (auto &[name, opt] : opts)
        given[name] = sub->get_option("--" + name)->count() > 0;
      if (given["gamma"]) cfg.gamma = gamma;
      if (given["q"]) cfg.q = q;
      if (given["p"]) cfg.p = p;
      if (given["grid-l"]) cfg.grid_l = grid_l;
      if (given["grid-n"]) cfg.grid_n = grid_n;
      if (given["samples"]) cfg.samples = samples;
      if (given["format"]) cfg.format = format;
    }
  if (!config_path.empty()) {
    json j;
    try {
      j = json::parse(io::read_file(config_path));
    } catch (const json::exception &e) {
      throw ConfigError("config: " + std::string(e.what()));
    } catch (const io::FormatError &e) {
      throw ConfigError(e.what());
    }
    if (given.empty())
      for (const std::string key : {"gamma", "q", "p", "d", "grid-l", "grid-n", "tol", "seed", "samples",
                                    "out", "format", "potential"})
        given[key] = false;
    detail::apply_json(cfg, j, given);
  }
  if (cfg.command.empty())
    throw ConfigError("no command given; expected one of ground-state, constants, eigen, "
                      "holder-verify, hessian, stability-sweep, convergence");
  try {
    detail::validate(cfg);
  } catch (const InvalidExponentError &e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Reports

/// A flat table for CSV emission; cells are numbers or text.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::variant<double, std::string>>> rows;
};

struct Report {
  json summary;
  std::optional<Table> table;
  std::vector<std::string> violations; ///< each names the offending record
  std::string default_format = "json";
};

namespace detail {

inline json number(double v) { return v; }
inline json maybe(const std::optional<double> &v) { return v ? json(*v) : json("undefined"); }

/// Walks a JSON value and records every non-finite number as a violation.
inline void scan_finite(const json &j, const std::string &path, std::vector<std::string> &out) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>()))
      out.push_back("non-finite value at " + path);
  } else if (j.is_object()) {
    for (const auto &[k, v] : j.items())
      scan_finite(v, path + "/" + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      scan_finite(j[i], path + "/" + std::to_string(i), out);
  }
}

inline std::string csv_cell(const std::variant<double, std::string> &c) {
  if (const double *d = std::get_if<double>(&c))
    return io::format_double(*d);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table &t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto &row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

inline json table_json(const Table &t) {
  json rows = json::array();
  for (const auto &row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto &v) { r[t.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void scan_table(const Table &t, std::vector<std::string> &out) {
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.rows[r].size(); ++c)
      if (const double *d = std::get_if<double>(&t.rows[r][c]); d && !std::isfinite(*d))
        out.push_back("non-finite " + t.columns[c] + " in row " + std::to_string(r + 1));
}

inline GridPtr radial_or_line(int d, double L, std::size_t n) {
  return d == 1 ? Grid::line(L, n) : Grid::radial(d, L, n);
}

} // namespace detail

/// Ground state with a grid chosen for (q, d) unless the config fixes one.
/// In d = 3 the profile can spread over hundreds of units, so without an
/// explicit grid the domain grows until the tail is resolved.
inline groundstate::GroundState ground_state_for(const RunConfig &cfg, double q, double base_l,
                                                 std::size_t base_n) {
  const int d = cfg.d;
  const double L = cfg.grid_l.value_or(base_l);
  const std::size_t n = cfg.grid_n.value_or(base_n);
  if (cfg.grid_l || d == 1)
    return groundstate::solve_ground_state(q, d, Grid::radial(d, L, n), cfg.tol);
  double l = L;
  for (int attempt = 0;; ++attempt) {
    try {
      auto gs = groundstate::solve_ground_state(q, d, Grid::radial(d, l, n), cfg.tol);
      if (!gs.domain_warning || attempt == 2)
        return gs;
    } catch (const ConvergenceError &) {
      if (attempt == 2)
        throw;
    }
    l *= 5.0;
  }
}

inline double default_extent(int d) { return d == 1 ? 20.0 : d == 2 ? 60.0 : 300.0; }

inline Report run_ground_state(const RunConfig &cfg) {
  const auto e = cfg.exponents();
  const auto gs = ground_state_for(cfg, e.q, default_extent(cfg.d), cfg.d == 1 ? 4000 : 20000);
  Report r;
  json j = io::to_json(gs);
  j.erase("Q");
  j["gamma"] = e.gamma;
  j["p"] = e.p;
  j["flow_steps"] = gs.flow_steps;
  j["newton_steps"] = gs.newton_steps;
  r.summary = j;
  Table t{{"r", "Q"}, {}};
  for (std::size_t i = 0; i < gs.Q.size(); ++i)
    t.rows.push_back({gs.grid()->coord(i), gs.Q[i]});
  r.table = t;
  if (!(gs.E < 0.0))
    r.violations.push_back("ground-state: E = " + io::format_double(gs.E) + " is not negative");
  return r;
}

inline Report run_constants(const RunConfig &cfg) {
  const auto e = cfg.exponents();
  const auto gs = ground_state_for(cfg, e.q, default_extent(cfg.d), cfg.d == 1 ? 4000 : 20000);
  const auto kc = groundstate::keller_constant(e.gamma, e.d, gs);
  const auto vir = groundstate::virial_norm_check(gs);
  Report r;
  json j{{"gamma", e.gamma},
         {"d", e.d},
         {"p", e.p},
         {"q", e.q},
         {"C", kc.via_energy},
         {"C_via_potential", kc.via_potential},
         {"route_mismatch", kc.mismatch},
         {"lambda_W", kc.lambda_W},
         {"C_prime", gs.C_prime},
         {"S", gs.S},
         {"norm_q", gs.norm_q},
         {"virial_mismatch", vir.mismatch},
         {"el_residual", gs.el_residual},
         {"domain_warning", gs.domain_warning},
         {"grid", io::grid_to_json(*gs.grid())}};
  if (kc.mismatch > 1e-6)
    r.violations.push_back("constants: route mismatch " + io::format_double(kc.mismatch) +
                           " exceeds 1e-6");
  if (e.d == 1) {
    const double exact = -groundstate::keller_parameters(e.q).E;
    const double rel = std::abs(kc.via_energy - exact) / exact;
    j["closed_form"] = exact;
    j["closed_form_rel_error"] = rel;
    if (rel > 1e-5)
      r.violations.push_back("constants: C differs from the closed form by " + io::format_double(rel));
  }
  r.summary = j;
  return r;
}

inline Report run_eigen(const RunConfig &cfg) {
  io::Column2 c;
  try {
    std::istringstream is(io::read_file(cfg.potential));
    c = io::read_csv_columns(is);
  } catch (const io::FormatError &e) {
    throw ConfigError(e.what());
  }
  const GridPtr grid =
      detail::radial_or_line(cfg.d, cfg.grid_l.value_or(20.0), cfg.grid_n.value_or(4000));
  GridFunction V = [&] {
    try {
      return io::resample_potential(c, grid);
    } catch (const DimensionError &e) {
      throw ConfigError(e.what());
    }
  }();
  const auto ep = spectral::lowest_eigenpair(V, 0, cfg.tol);
  Report r;
  r.summary = json{{"lambda", std::min(0.0, ep.lambda)},
                   {"lambda_discrete", ep.lambda},
                   {"residual", ep.residual},
                   {"iterations", ep.iterations},
                   {"bound", ep.lambda < 0.0},
                   {"grid", io::grid_to_json(*grid)}};
  Table t{{grid->kind() == GridKind::Line ? "x" : "r", "V", "psi"}, {}};
  for (std::size_t i = 0; i < grid->size(); ++i)
    t.rows.push_back({grid->coord(i), V[i], ep.psi[i]});
  r.table = t;
  return r;
}

inline Report run_holder(const RunConfig &cfg) {
  const std::vector<double> ps = cfg.p ? std::vector<double>{*cfg.p} : holder::fuzz_exponents();
  const long samples = cfg.samples.value_or(10000);
  const auto rep = holder::fuzz_holder(samples, cfg.seed, ps);
  Report r;
  json checks = json::object();
  for (const auto &[name, s] : rep.checks) {
    json c{{"checked", s.checked}, {"violations", s.violations}, {"tightest", s.tightest}};
    if (s.violations)
      c["first_violation"] = s.first_violation;
    checks[name] = c;
    if (s.violations)
      r.violations.push_back("holder-verify: " + name + " failed at " + s.first_violation);
  }
  json sharp = json::array();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto &s = rep.sharpness[i];
    const bool ok = holder::sharpness_ok(s, ps[i]);
    sharp.push_back({{"p", ps[i]}, {"delta", s.delta}, {"ratio", s.ratio}, {"upper", 1.1 / ps[i]}, {"ok", ok}});
    if (!ok)
      r.violations.push_back("holder-verify: sharpness ratio " + io::format_double(s.ratio) +
                             " outside (0, 1.1/p] at p = " + io::format_double(ps[i]));
  }
  r.summary = json{{"samples", samples}, {"seed", cfg.seed},       {"exponents", ps},
                   {"violations", rep.violations()}, {"checks", checks}, {"sharpness", sharp}};
  return r;
}

inline Report run_hessian(const RunConfig &cfg) {
  const auto e = cfg.exponents();
  const std::size_t n = cfg.grid_n.value_or(cfg.d == 1 ? 1200 : 2000);
  const auto gs = ground_state_for(cfg, e.q, cfg.d == 1 ? 30.0 : default_extent(cfg.d), n);
  auto rep = hessian::kernel_report(gs);
  const auto fine = groundstate::solve_ground_state(
      e.q, e.d, Grid::radial(e.d, gs.grid()->extent(), 2 * gs.grid()->size()), cfg.tol);
  const auto shrink = hessian::kernel_shrink(gs, fine);
  const auto scan =
      hessian::local_stability_scan(gs, cfg.seed, std::size_t(cfg.samples.value_or(20)));
  rep.empirical_c = scan.min_c;

  Report r;
  json j = io::to_json(rep);
  j["q"] = e.q;
  j["d"] = e.d;
  j["grid"] = io::grid_to_json(*gs.grid());
  json sj = json::array();
  for (const auto &s : shrink) {
    sj.push_back({{"ell", s.ell}, {"coarse", s.coarse}, {"fine", s.fine}, {"ratio", s.ratio},
                  {"at_floor", s.at_floor}, {"ok", s.ok}});
    if (!s.ok)
      r.violations.push_back("hessian: channel " + std::to_string(s.ell) + " kernel ratio " +
                             io::format_double(s.ratio) + " under refinement");
  }
  j["refinement"] = sj;
  j["probe"] = {{"directions", scan.directions.size()},
                {"t", scan.ts},
                {"max_spread", scan.max_spread},
                {"all_positive", scan.all_positive}};
  for (const auto &a : rep.anomalies)
    r.violations.push_back("hessian: " + a);
  if (!scan.all_positive)
    r.violations.push_back("hessian: nonpositive deficit along a probe direction");
  if (scan.max_spread >= 0.1)
    r.violations.push_back("hessian: deficit/t^2 varies by " + io::format_double(scan.max_spread));
  r.summary = j;
  Table t{{"direction", "c", "spread"}, {}};
  for (std::size_t k = 0; k < scan.directions.size(); ++k)
    t.rows.push_back({double(k), scan.directions[k].c, scan.directions[k].spread});
  r.table = t;
  return r;
}

/// The sweep grid for V and the matching ground state: a line of extent 40
/// and a half-line ground state four times finer in d = 1, radial grids
/// otherwise.
struct SweepSetup {
  corpus::SweepSpec spec;
  groundstate::GroundState gs;
  std::vector<corpus::Entry> entries;
};

inline SweepSetup sweep_setup(const RunConfig &cfg) {
  const auto e = cfg.exponents();
  const double L = cfg.grid_l.value_or(40.0);
  const std::size_t n = cfg.grid_n.value_or(cfg.d == 1 ? 8000 : 4000);
  if (cfg.d == 1) {
    auto gs = groundstate::solve_ground_state(e.q, 1, Grid::radial(1, L, 2 * n), cfg.tol);
    return {{e.gamma, 1, Grid::line(L, n)}, std::move(gs), corpus::line_corpus()};
  }
  RunConfig gcfg = cfg;
  gcfg.grid_l.reset();
  gcfg.grid_n.reset();
  auto gs = ground_state_for(gcfg, e.q, default_extent(cfg.d), 20000);
  auto entries = corpus::radial_corpus(gs);
  return {{e.gamma, cfg.d, Grid::radial(cfg.d, L, n)}, std::move(gs), std::move(entries)};
}

inline Report run_sweep(const RunConfig &cfg) {
  const SweepSetup s = sweep_setup(cfg);
  const auto rows = corpus::sweep(s.entries, s.spec, s.gs);
  const auto sum = corpus::summarize(rows);
  Report r;
  r.default_format = "csv";
  Table t{{"family", "param", "lambda", "ratio", "C", "deficit", "distance", "empirical_c", "matched_a",
           "matched_b", "branch", "transfer_distance", "trans_lhs", "trans_rhs", "trans_holds", "e_part",
           "h_part"},
          {}};
  const double floor = 1e-8;
  for (const auto &row : rows) {
    const auto &rep = row.report;
    const std::string at = corpus::label(row);
    auto opt = [](const std::optional<double> &v) -> std::variant<double, std::string> {
      if (v)
        return *v;
      return std::string("undefined");
    };
    std::variant<double, std::string> ep = std::string("undefined"), hp = std::string("undefined");
    if (row.decomposition) {
      ep = row.decomposition->e_part;
      hp = row.decomposition->h_part;
      if (row.decomposition->e_part < -floor || row.decomposition->h_part < -floor)
        r.violations.push_back("stability-sweep: negative decomposition term at " + at);
      if (std::abs(row.decomposition->e_part + row.decomposition->h_part - rep.deficit) > floor)
        r.violations.push_back("stability-sweep: decomposition does not sum to the deficit at " + at);
    }
    t.rows.push_back({row.family, row.param, rep.lambda, rep.ratio, rep.C, rep.deficit, rep.distance,
                      opt(rep.empirical_c), rep.matched_a, rep.matched_b, std::string(stability::to_string(rep.branch)),
                      opt(rep.transfer_distance), rep.trans.lhs, rep.trans.rhs,
                      std::string(rep.trans.holds ? "true" : "false"), ep, hp});
    if (rep.deficit < -floor * rep.C)
      r.violations.push_back("stability-sweep: negative deficit at " + at);
    if (rep.empirical_c && !(*rep.empirical_c > 0.0))
      r.violations.push_back("stability-sweep: nonpositive empirical_c at " + at);
    if (!rep.trans.holds)
      r.violations.push_back("stability-sweep: trans inequality fails at " + at);
  }
  r.table = t;
  r.summary = json{{"gamma", s.spec.gamma},
                   {"d", s.spec.d},
                   {"corpus_size", sum.size},
                   {"branch", stability::to_string(sum.branch)},
                   {"min_empirical_c", detail::maybe(sum.min_empirical_c)},
                   {"min_empirical_c_at", sum.min_empirical_c_at},
                   {"min_deficit", sum.min_deficit},
                   {"trans_all", sum.trans_all},
                   {"min_decomposition_term", sum.min_part},
                   {"max_identity_error", sum.max_identity_error},
                   {"grid", io::grid_to_json(*s.spec.grid)},
                   {"ground_state_grid", io::grid_to_json(*s.gs.grid())}};
  if (!sum.min_empirical_c)
    r.violations.push_back("stability-sweep: no potential far enough from the manifold for empirical_c");
  return r;
}

struct RichardsonRow {
  std::size_t n = 0;
  double h = 0.0;
  double value = 0.0;
  std::optional<double> error;
  std::optional<double> ratio;
};

/// Ratio of successive errors (exact value known) or of successive
/// differences (Richardson), one entry per row from the third on.
inline std::vector<RichardsonRow> richardson(std::vector<RichardsonRow> rows, std::optional<double> exact) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (exact)
      rows[i].error = rows[i].value - *exact;
    if (exact && i >= 1)
      rows[i].ratio = *rows[i - 1].error / *rows[i].error;
    if (!exact && i >= 2)
      rows[i].ratio = (rows[i - 2].value - rows[i - 1].value) / (rows[i - 1].value - rows[i].value);
  }
  return rows;
}

inline json richardson_json(const std::vector<RichardsonRow> &rows) {
  json a = json::array();
  for (const auto &r : rows)
    a.push_back({{"n", r.n}, {"h", r.h}, {"value", r.value}, {"error", detail::maybe(r.error)},
                 {"ratio", detail::maybe(r.ratio)}});
  return a;
}

inline Report run_convergence(const RunConfig &cfg) {
  Report r;
  Table t{{"quantity", "n", "h", "value", "error", "ratio"}, {}};
  auto check = [&](const std::string &what, const std::vector<RichardsonRow> &rows) {
    for (const auto &row : rows) {
      t.rows.push_back({what, double(row.n), row.h, row.value,
                        row.error ? std::variant<double, std::string>(*row.error) : std::string("undefined"),
                        row.ratio ? std::variant<double, std::string>(*row.ratio) : std::string("undefined")});
      if (row.ratio && !(*row.ratio >= 3.2 && *row.ratio <= 4.8))
        r.violations.push_back("convergence: " + what + " ratio " + io::format_double(*row.ratio) +
                               " at n = " + std::to_string(row.n) + " is outside 4 +- 20%");
    }
  };

  // Poeschl-Teller well -2 sech^2 with exact ground energy -1.
  const double L = cfg.grid_l.value_or(20.0);
  const std::size_t n0 = cfg.grid_n.value_or(1000);
  std::vector<RichardsonRow> eig;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t n = n0 << k;
    const GridPtr g = Grid::line(L, n);
    const auto V = GridFunction::sample(g, [](double x) { return -2.0 * corpus::sech2(x); });
    eig.push_back({n, g->spacing(), spectral::lowest_eigenpair(V, 0, cfg.tol).lambda, {}, {}});
  }
  eig = richardson(eig, -1.0);
  check("lambda(-2sech^2)", eig);
  json j{{"eigenvalue", richardson_json(eig)}};

  if (cfg.gamma || cfg.q) {
    const auto e = cfg.exponents();
    const double Lg = cfg.grid_l.value_or(default_extent(cfg.d));
    const std::size_t ng = cfg.grid_n.value_or(cfg.d == 1 ? 500 : 5000);
    std::vector<RichardsonRow> en, nq;
    for (std::size_t k = 0; k < 3; ++k) {
      const GridPtr g = Grid::radial(cfg.d, Lg, ng << k);
      const auto gs = groundstate::solve_ground_state(e.q, e.d, g, cfg.tol);
      en.push_back({ng << k, g->spacing(), gs.E, {}, {}});
      nq.push_back({ng << k, g->spacing(), gs.norm_q, {}, {}});
    }
    std::optional<double> exactE, exactN;
    if (e.d == 1) {
      const auto kp = groundstate::keller_parameters(e.q);
      exactE = kp.E;
      exactN = kp.norm_q;
    }
    en = richardson(en, exactE);
    nq = richardson(nq, exactN);
    check("E", en);
    check("norm_q", nq);
    j["q"] = e.q;
    j["d"] = e.d;
    j["E"] = richardson_json(en);
    j["norm_q"] = richardson_json(nq);
  }
  r.summary = j;
  r.table = t;
  return r;
}

inline Report dispatch(const RunConfig &cfg) {
  const std::string &c = cfg.command;
  if (c == "ground-state")
    return run_ground_state(cfg);
  if (c == "constants")
    return run_constants(cfg);
  if (c == "eigen")
    return run_eigen(cfg);
  if (c == "holder-verify")
    return run_holder(cfg);
  if (c == "hessian")
    return run_hessian(cfg);
  if (c == "stability-sweep")
    return run_sweep(cfg);
  return run_convergence(cfg);
}

/// Runs the command and writes its output. With --out the report goes to
/// that file in the chosen format and a summary line goes to `out`;
/// otherwise the report itself goes to `out`. Returns the exit status.
inline int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Report r;
  try {
    r = dispatch(cfg);
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidExponentError &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error &e) {
    err << "contract violation: " << cfg.command << ": " << e.what() << '\n';
    return kExitViolation;
  }
  detail::scan_finite(r.summary, "", r.violations);
  if (r.table)
    detail::scan_table(*r.table, r.violations);

  const std::string format = cfg.format.value_or(r.default_format);
  std::string body;
  if (format == "csv" && r.table) {
    body = detail::to_csv(*r.table);
  } else {
    json full = r.summary;
    if (r.table && !cfg.out.empty())
      full["rows"] = detail::table_json(*r.table);
    body = full.dump(2) + "\n";
  }
  if (cfg.out.empty()) {
    out << body;
  } else {
    try {
      io::write_file(cfg.out, body);
    } catch (const io::FormatError &e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
    out << r.summary.dump(2) << '\n';
  }
  for (const auto &v : r.violations)
    err << "contract violation: " << v << '\n';
  return r.violations.empty() ? kExitOk : kExitViolation;
}

/// parse + run with the exit-status convention of the tool.
inline int main_entry(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  try {
    std::string help;
    try {
      cfg = parse(args, &help);
    } catch (const CLI::CallForHelp &) {
      out << help;
      return kExitOk;
    }
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run(cfg, out, err);
}

} // namespace keller::cli

#endif // KELLER_TOOLS_CLI_HPP
