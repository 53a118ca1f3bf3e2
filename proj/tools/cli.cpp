#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "bregfix/experiments.hpp"

namespace bregfix {
namespace {

// ---- config file parsing --------------------------------------------------

using KvEntries = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid number '" + s + "' for " + what);
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid integer '" + s + "' for " + what);
  }
}

Point parse_point(const std::string& s, const std::string& what) {
  Point p;
  for (const std::string& c : split(s, ';')) {
    p.push_back(parse_double(c, what));
  }
  if (p.empty()) throw config_error("empty point for " + what);
  return p;
}

KvEntries parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  KvEntries entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

void apply_overrides(KvEntries& entries,
                     const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw config_error("--set expects key=value, got '" + s + "'");
    }
    entries.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
}

void reject_unknown_keys(const KvEntries& entries,
                         const std::set<std::string>& known) {
  for (const auto& [k, v] : entries) {
    if (!known.count(k)) throw config_error("unknown config key '" + k + "'");
  }
}

// Last occurrence wins so that --set overrides file values.
std::optional<std::string> get(const KvEntries& entries,
                               const std::string& key) {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries) {
    if (k == key) out = v;
  }
  return out;
}

std::string require(const KvEntries& entries, const std::string& key) {
  auto v = get(entries, key);
  if (!v) throw config_error("missing required config key '" + key + "'");
  return *v;
}

// ---- spec strings ---------------------------------------------------------

// name[:params]
std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

Box hull(const Box& a, const Box& b) {
  Box out = a;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    out.lo[i] = std::min(out.lo[i], b.lo[i]);
    out.hi[i] = std::max(out.hi[i], b.hi[i]);
  }
  return out;
}

BregmanFunction parse_function(const std::string& spec, std::size_t dim,
                               const Box& domain) {
  const auto [name, params] = split_spec(spec);
  BregmanFunction bf;
  if (name == "squared_norm") {
    if (!params.empty()) throw config_error("squared_norm takes no parameter");
    bf = squared_norm(dim);
  } else if (name == "quadratic") {
    const double c = parse_double(params, "function quadratic");
    if (c <= 0.0) throw config_error("quadratic coefficient must be > 0");
    bf = scaled_quadratic(c, dim);
  } else if (name == "quartic") {
    if (!params.empty()) throw config_error("quartic takes no parameter");
    bf = quartic(dim);
  } else if (name == "poly") {
    std::vector<double> coeffs;
    for (const std::string& c : split(params, ',')) {
      coeffs.push_back(parse_double(c, "function poly"));
    }
    bf = separable_polynomial(coeffs, domain);
  } else {
    throw config_error("unknown function '" + spec + "'");
  }
  // Keep the sampling/validity box at least as large as the working box.
  bf.domain = hull(bf.domain, domain);
  return bf;
}

Mapping parse_mapping(const std::string& spec, const Box& domain) {
  const auto [name, params] = split_spec(spec);
  if (name == "scale") {
    return scale_map(parse_double(params, "mapping scale"), domain);
  }
  if (name == "affine") {
    const auto parts = split(params, ',');
    if (parts.size() != 2) throw config_error("affine expects a,b");
    return affine_map(parse_double(parts[0], "mapping affine a"),
                      parse_double(parts[1], "mapping affine b"), domain);
  }
  if (name == "power") {
    return power_map(parse_double(params, "mapping power"), domain);
  }
  if (name == "identity") return identity_map(domain);
  if (name == "constant") {
    return constant_map(parse_point(params, "mapping constant"), domain);
  }
  throw config_error("unknown mapping '" + spec + "'");
}

void require_unit_interval(double v, const std::string& what) {
  if (!(v >= 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << what << " value " << v << " must lie in [0,1)";
    throw config_error(os.str());
  }
}

Schedule parse_schedule(const std::string& spec) {
  const auto [name, params] = split_spec(spec);
  if (name == "section6") {
    if (!params.empty()) throw config_error("section6 takes no parameters");
    return Schedule::section6();
  }
  const auto parts = split(params, ',');
  if (parts.size() != 3) {
    throw config_error("schedule " + name + " expects alpha,beta,gamma");
  }
  const double a = parse_double(parts[0], "schedule alpha");
  const double b = parse_double(parts[1], "schedule beta");
  const double g = parse_double(parts[2], "schedule gamma");
  require_unit_interval(a, "schedule alpha");
  require_unit_interval(b, "schedule beta");
  require_unit_interval(g, "schedule gamma");
  if (name == "constant") return Schedule::constant(a, b, g);
  if (name == "harmonic") return Schedule::harmonic(a, b, g);
  throw config_error("unknown schedule '" + spec + "'");
}

Box parse_domain(const KvEntries& entries, std::size_t dim) {
  const double lo = parse_double(require(entries, "domain.lo"), "domain.lo");
  const double hi = parse_double(require(entries, "domain.hi"), "domain.hi");
  if (!(lo < hi)) throw config_error("domain.lo must be < domain.hi");
  return Box::interval(lo, hi, dim);
}

std::size_t parse_dim(const KvEntries& entries) {
  const auto v = get(entries, "dim");
  if (!v) return 1;
  const long d = parse_long(*v, "dim");
  if (d < 1) throw config_error("dim must be >= 1");
  return static_cast<std::size_t>(d);
}

// ---- subcommands ----------------------------------------------------------

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& sets,
            const std::string& out_override) {
  KvEntries entries = parse_config_file(config_path);
  apply_overrides(entries, sets);
  reject_unknown_keys(entries,
                      {"scheme", "function", "mapping", "domain.lo",
                       "domain.hi", "dim", "x1", "u", "schedule", "max_iter",
                       "stop_tol", "out"});

  const std::size_t dim = parse_dim(entries);
  IterationConfig cfg;
  const std::string scheme = require(entries, "scheme");
  const auto kind = scheme_from_name(scheme);
  if (!kind) throw config_error("unknown scheme '" + scheme + "'");
  cfg.scheme = *kind;
  cfg.c = parse_domain(entries, dim);
  if (auto fn = get(entries, "function")) {
    cfg.bf = parse_function(*fn, dim, cfg.c);
  }
  cfg.t = parse_mapping(require(entries, "mapping"), cfg.c);
  cfg.x1 = parse_point(require(entries, "x1"), "x1");
  if (auto u = get(entries, "u")) cfg.anchor_u = parse_point(*u, "u");
  cfg.schedule = parse_schedule(require(entries, "schedule"));
  cfg.max_iter = parse_long(require(entries, "max_iter"), "max_iter");
  if (auto st = get(entries, "stop_tol")) {
    cfg.stop_tol = parse_double(*st, "stop_tol");
  }

  std::string out = out_override;
  if (out.empty()) {
    if (auto o = get(entries, "out")) out = *o;
  }
  if (out.empty()) out = "out";

  IterationTrace trace = run_iteration(cfg);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    throw numeric_error("cannot create output directory '" + out +
                        "': " + ec.message());
  }
  const fs::path dir(out);
  write_trace_csv(trace, (dir / "trace.csv").string());
  write_trace_csv_full(trace, (dir / "trace_full.csv").string());
  emit_plot_data(trace, (dir / "plot_data.csv").string(),
                 (dir / "plot.svg").string());
  {
    std::ofstream rep(dir / "report.txt");
    if (!rep) throw numeric_error("cannot write report.txt");
    rep << "scheme: " << scheme_name(cfg.scheme) << "\n"
        << "rows: " << trace.rows.size() << "\n"
        << "stop: "
        << (trace.terminated_reason == StopReason::step_tol ? "step_tol"
                                                            : "max_iter")
        << "\n";
    rep << std::setprecision(17) << "final:";
    for (double v : trace.final_iterate()) rep << " " << v;
    rep << "\nfinal_step: " << trace.rows.back().step_norm << "\n";
  }
  std::cout << "wrote " << trace.rows.size() << " rows to " << out
            << std::endl;
  return 0;
}

struct CheckSpec {
  std::string cls;
  std::optional<double> alpha;
  bool expect_holds = true;
};

int cmd_verify(const std::string& config_path,
               const std::vector<std::string>& sets, int jobs, double tol) {
  KvEntries entries = parse_config_file(config_path);
  apply_overrides(entries, sets);
  reject_unknown_keys(entries, {"function", "mapping", "domain.lo",
                                "domain.hi", "dim", "grid.points", "check"});

  const std::size_t dim = parse_dim(entries);
  const Box domain = parse_domain(entries, dim);
  const Mapping t = parse_mapping(require(entries, "mapping"), domain);
  std::optional<BregmanFunction> bf;
  if (auto fn = get(entries, "function")) {
    bf = parse_function(*fn, dim, domain);
  }
  GridSpec grid;
  if (auto g = get(entries, "grid.points")) {
    const long n = parse_long(*g, "grid.points");
    if (n < 2) throw config_error("grid.points must be >= 2");
    grid.points_per_dim = static_cast<std::size_t>(n);
  }

  std::vector<CheckSpec> checks;
  for (const auto& [k, v] : entries) {
    if (k != "check") continue;
    std::istringstream is(v);
    std::string clsspec, expect;
    is >> clsspec >> expect;
    std::string rest;
    if (!is.eof()) is >> rest;
    if (clsspec.empty() || expect.empty() || !rest.empty() ||
        (expect != "holds" && expect != "violated")) {
      throw config_error("check expects '<class>[:alpha] holds|violated', "
                         "got '" + v + "'");
    }
    CheckSpec cs;
    const auto [cls, params] = split_spec(clsspec);
    cs.cls = cls;
    if (!params.empty()) cs.alpha = parse_double(params, "check alpha");
    cs.expect_holds = expect == "holds";
    checks.push_back(cs);
  }
  if (checks.empty()) throw config_error("empty check list");

  auto need_alpha = [](const CheckSpec& c) -> double {
    if (!c.alpha) throw config_error("class " + c.cls + " requires :alpha");
    return *c.alpha;
  };
  auto need_bf = [&](const CheckSpec& c) -> const BregmanFunction& {
    if (!bf) throw config_error("class " + c.cls + " requires a function");
    return *bf;
  };

  int mismatches = 0;
  for (const CheckSpec& c : checks) {
    PropertyReport rep;
    if (c.cls == "nonexpansive") {
      rep = check_nonexpansive(t, grid, tol, jobs);
    } else if (c.cls == "condition_C") {
      rep = check_condition_C(t, grid, tol, jobs);
    } else if (c.cls == "alpha_nonexpansive") {
      rep = check_alpha_nonexpansive(t, need_alpha(c), grid, tol, jobs);
    } else if (c.cls == "generalized_alpha") {
      rep = check_generalized_alpha(t, need_alpha(c), grid, tol, jobs);
    } else if (c.cls == "bregman_generalized_alpha") {
      rep = check_bregman_generalized_alpha(need_bf(c), t, need_alpha(c),
                                            grid, tol, jobs);
    } else if (c.cls == "bregman_quasi") {
      rep = check_bregman_quasi(need_bf(c), t, grid, tol, jobs);
    } else if (c.cls == "bregman_skew_quasi") {
      rep = check_bregman_skew_quasi(need_bf(c), t, grid, tol, jobs);
    } else if (c.cls == "bregman_nonspreading") {
      rep = check_bregman_nonspreading(need_bf(c), t, grid, tol, jobs);
    } else {
      throw config_error("unknown class '" + c.cls + "'");
    }
    const bool holds = rep.verdict == Verdict::holds_on_grid;
    const bool ok = holds == c.expect_holds &&
                    (holds || rep.witness.has_value());
    if (!ok) ++mismatches;
    std::cout << rep.to_line() << " expected="
              << (c.expect_holds ? "holds" : "violated")
              << " result=" << (ok ? "match" : "MISMATCH") << "\n";
  }
  return mismatches == 0 ? 0 : 1;
}

int cmd_reproduce(const std::string& id, const std::string& out, int jobs) {
  const ExperimentOutcome outcome = write_experiment_outputs(id, out, jobs);
  std::cout << outcome.summary << std::endl;
  return outcome.pass ? 0 : 1;
}

int cmd_project(const std::string& fn_spec, double lo, double hi,
                std::size_t dim, const std::string& point_spec) {
  if (!(lo < hi)) throw config_error("--lo must be < --hi");
  const Box box = Box::interval(lo, hi, dim);
  const BregmanFunction bf = parse_function(fn_spec, dim, box);
  const Point x = parse_point(point_spec, "point");
  if (x.size() != dim) throw config_error("point dimension does not match");
  const Point p = bregman_project(bf, box, x);
  const double slack =
      projection_characterization_slack_vertices(bf, box, x);
  std::cout << std::setprecision(17) << "projection:";
  for (double v : p) std::cout << " " << v;
  std::cout << "\ncharacterization_slack: " << slack << std::endl;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Bregman-distance fixed-point iteration toolkit"};
  app.require_subcommand(1);

  std::string config_path, out, experiment_id, point_spec;
  std::string fn_spec = "squared_norm";
  std::vector<std::string> sets;
  int jobs = 1;
  double tol = kVerifierTol;
  double lo = -1.0, hi = 1.0;
  std::size_t dim = 1;

  CLI::App* run = app.add_subcommand("run", "Run a configured iteration");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--set", sets, "Override key=value");
  run->add_option("--out", out, "Output directory");

  CLI::App* verify =
      app.add_subcommand("verify", "Run mapping-class verifiers");
  verify->add_option("config", config_path, "Config file")->required();
  verify->add_option("--set", sets, "Override key=value");
  verify->add_option("--jobs", jobs, "Parallel sweep jobs");
  verify->add_option("--tol", tol, "Verifier tolerance");

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Reproduce a built-in experiment");
  reproduce->add_option("experiment", experiment_id,
                        "One of: table1, example1, figure1")->required();
  reproduce->add_option("--out", out, "Output directory");
  reproduce->add_option("--jobs", jobs, "Parallel sweep jobs");

  CLI::App* project =
      app.add_subcommand("project", "One-shot Bregman projection query");
  project->add_option("point", point_spec, "Point, ';'-separated coordinates")
      ->required();
  project->add_option("--function", fn_spec, "Function spec");
  project->add_option("--lo", lo, "Box lower bound");
  project->add_option("--hi", hi, "Box upper bound");
  project->add_option("--dim", dim, "Dimension");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (jobs < 1) throw config_error("--jobs must be >= 1");
    if (run->parsed()) return cmd_run(config_path, sets, out);
    if (verify->parsed()) return cmd_verify(config_path, sets, jobs, tol);
    if (reproduce->parsed()) {
      return cmd_reproduce(experiment_id, out.empty() ? "out" : out, jobs);
    }
    if (project->parsed()) {
      return cmd_project(fn_spec, lo, hi, dim, point_spec);
    }
    std::cerr << "error: no subcommand" << std::endl;
    return 2;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::flush;
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All) << std::flush;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const domain_violation& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  }
}

}  // namespace bregfix
