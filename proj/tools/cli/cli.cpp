#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "format.hpp"
#include "plot.hpp"
#include "tdeform/tdeform.hpp"
#include "verify.hpp"

namespace tdeform::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Thrown for anything the user can fix on the command line or in a config file.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Newton refinement disagreeing with the closed-form equilibria.
struct NewtonMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ModelOptions {
  double a = 2.0;
  double b = 0.2;
  double c = 30.0;
  double g = 0.9;

  DeformedParams params() const { return {{a, b, c}, g}; }
  void add_to(CLI::App* app, bool with_g = true) {
    app->add_option("--a", a, "T-system parameter a (must be nonzero)")->capture_default_str();
    app->add_option("--b", b, "T-system parameter b")->capture_default_str();
    app->add_option("--c", c, "T-system parameter c")->capture_default_str();
    if (with_g) app->add_option("--g", g, "deformation parameter g (alpha = g z)")->capture_default_str();
  }
  void record(RunManifest& m, bool with_g = true) const {
    m.add("a", a).add("b", b).add("c", c);
    if (with_g) m.add("g", g);
  }
};

struct InitialOptions {
  double x0 = 0.01, y0 = 0.01, z0 = 14.01;

  State state() const { return {x0, y0, z0}; }
  void add_to(CLI::App* app) {
    app->add_option("--x0", x0, "initial x")->capture_default_str();
    app->add_option("--y0", y0, "initial y")->capture_default_str();
    app->add_option("--z0", z0, "initial z")->capture_default_str();
  }
  void record(RunManifest& m) const { m.add("x0", x0).add("y0", y0).add("z0", z0); }
};

struct LyapunovOptions {
  double transient = 100.0;
  double total_time = 5000.0;
  double dt = 1e-3;
  double renorm = 0.1;

  void add_to(CLI::App* app) {
    app->add_option("--transient", transient, "time discarded before averaging")->capture_default_str();
    app->add_option("--total-time", total_time, "averaging window")->capture_default_str();
    app->add_option("--dt", dt, "RK4 step")->capture_default_str();
    app->add_option("--renorm", renorm, "Gram-Schmidt interval (multiple of dt)")->capture_default_str();
  }
  void record(RunManifest& m) const {
    m.add("transient", transient).add("total-time", total_time).add("dt", dt).add("renorm", renorm);
  }
  LyapunovConfig config(const State& init) const {
    LyapunovConfig cfg;
    cfg.transient = transient;
    cfg.total_time = total_time;
    cfg.dt = dt;
    cfg.renorm_interval = renorm;
    cfg.initial_condition = init;
    return cfg;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  return f;
}

void write_text_file(const std::string& path, const std::string& text) {
  auto f = open_output(path);
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

// Writes to the named file, or to `out` when path is "-".
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(out);
    return;
  }
  auto f = open_output(path);
  body(f);
  if (!f) throw UsageError("failed writing '" + path + "'");
}

std::string format_eigenvalue(std::complex<double> e) {
  if (e.imag() == 0.0) return format_table(e.real());
  return fmt::format("{}{}{}i", format_table(e.real()), e.imag() < 0 ? '-' : '+', format_table(std::fabs(e.imag())));
}

// --- simulate ---------------------------------------------------------------

struct SimulateOptions {
  ModelOptions model;
  InitialOptions init;
  double t_end = 200.0;
  double dt = 1e-3;
  double tol = 1e-10;
  double transient = 0.0;
  double sample_every = 0.01;
  std::string out_path;
  std::string plot_path;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const bool adaptive = o.tol_opt->count() > 0;
  if (!(o.t_end > 0.0)) throw UsageError("--t-end must be > 0 (the time span [0, t-end] is empty)");
  if (!(o.transient >= 0.0) || !(o.transient < o.t_end)) throw UsageError("--transient must lie in [0, t-end)");
  if (!(o.sample_every >= 0.0)) throw UsageError("--sample-every must be >= 0");
  if (!o.plot_path.empty() && o.out_path == "-") throw UsageError("--plot needs --out to name a file");

  const auto field = particular_field(o.model.params());
  const auto cfg = adaptive ? IntegrationConfig::high_accuracy(0.0, o.t_end, o.tol, o.sample_every)
                            : IntegrationConfig::fixed(0.0, o.t_end, o.dt, o.sample_every);
  const auto traj = integrate(field, o.init.state(), cfg);

  RunManifest m("simulate");
  o.model.record(m);
  o.init.record(m);
  m.add("t-end", o.t_end);
  if (adaptive) m.add("tol", o.tol);
  else m.add("dt", o.dt);
  m.add("transient", o.transient).add("sample-every", o.sample_every).add("out", o.out_path);
  if (!o.plot_path.empty()) m.add("plot", o.plot_path);
  m.set_wall_seconds(seconds_since(start));

  emit(o.out_path, out, [&](std::ostream& os) {
    m.write_comments(os);
    os << "t,x,y,z\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj.times[i] < o.transient) continue;
      const State& s = traj.states[i];
      os << format_exact(traj.times[i]) << ',' << format_exact(s.x) << ',' << format_exact(s.y) << ','
         << format_exact(s.z) << '\n';
    }
  });
  if (!o.plot_path.empty())
    write_text_file(o.plot_path, trajectory_plot_script(o.out_path, o.plot_path,
                                                        fmt::format("a={} b={} c={} g={}", o.model.a, o.model.b,
                                                                    o.model.c, o.model.g)));
  return kExitOk;
}

// --- equilibria -------------------------------------------------------------

struct EquilibriaOptions {
  ModelOptions model;
  double tol = 1e-12;
  bool json = false;
};

int cmd_equilibria(const EquilibriaOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const auto dp = o.model.params();
  const auto closed = equilibria_closed_form(dp);
  const auto field = particular_field(dp);

  // Newton from each closed-form point must stay on it.
  const auto search = find_equilibria(field, closed.points, o.tol);
  if (!search.failures.empty() || search.equilibria.size() != closed.points.size())
    throw NewtonMismatch("Newton verification of the closed-form equilibria failed");
  for (const auto& p : closed.points) {
    const bool matched = std::any_of(search.equilibria.begin(), search.equilibria.end(),
                                     [&](const Equilibrium& e) { return max_abs(e.point - p) < 1e-8 * (1 + norm(p)); });
    if (!matched)
      throw NewtonMismatch("Newton moved away from a closed-form equilibrium");
  }

  RunManifest m("equilibria");
  o.model.record(m);
  m.add("tol", o.tol).add("json", o.json);
  m.set_wall_seconds(seconds_since(start));

  if (o.json) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& p : closed.points) {
      const auto e = make_equilibrium(field, p);
      nlohmann::ordered_json eig = nlohmann::ordered_json::array();
      for (const auto& l : e.eigenvalues) eig.push_back({{"re", l.real()}, {"im", l.imag()}});
      rows.push_back({{"point", {p.x, p.y, p.z}},
                      {"eigenvalues", eig},
                      {"classification", std::string(to_string(e.classification))},
                      {"residual", max_abs(field(p))}});
    }
    nlohmann::ordered_json doc{{"manifest", m.to_json()},
                               {"complex_branch", closed.complex_branch},
                               {"equilibria", rows}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }

  m.write_comments(out);
  if (closed.complex_branch) out << "# off-axis equilibria are complex; only the origin is real\n";
  out << fmt::format("{:>10} {:>10} {:>10}  {:<50} {:<16} {}\n", "x", "y", "z", "eigenvalues", "type", "|f|");
  for (const auto& p : closed.points) {
    const auto e = make_equilibrium(field, p);
    std::string eig;
    for (std::size_t i = 0; i < 3; ++i) eig += (i ? ", " : "") + format_eigenvalue(e.eigenvalues[i]);
    out << fmt::format("{:>10} {:>10} {:>10}  {:<50} {:<16} {:.1e}\n", format_table(p.x), format_table(p.y),
                       format_table(p.z), eig, to_string(e.classification), max_abs(field(p)));
  }
  return kExitOk;
}

// --- lyapunov ---------------------------------------------------------------

struct LyapunovCmdOptions {
  ModelOptions model;
  InitialOptions init;
  LyapunovOptions lyap;
  std::string field = "particular";
  std::string history_path;
  bool json = false;
};

int cmd_lyapunov(const LyapunovCmdOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const auto field = o.field == "linear-test" ? VectorField::diagonal_linear({-1.0, -2.0, -3.0})
                                              : particular_field(o.model.params());
  const auto res = lyapunov_spectrum(field, o.lyap.config(o.init.state()));

  RunManifest m("lyapunov");
  o.model.record(m);
  o.init.record(m);
  o.lyap.record(m);
  m.add("field", o.field).add("json", o.json);
  if (!o.history_path.empty()) m.add("history", o.history_path);
  m.set_wall_seconds(seconds_since(start));

  if (!o.history_path.empty()) {
    emit(o.history_path, out, [&](std::ostream& os) {
      m.write_comments(os);
      os << "time,lambda1,lambda2,lambda3\n";
      for (const auto& h : res.convergence_history)
        os << format_exact(h.time) << ',' << format_exact(h.exponents[0]) << ',' << format_exact(h.exponents[1])
           << ',' << format_exact(h.exponents[2]) << '\n';
    });
  }

  if (o.json) {
    nlohmann::ordered_json doc{{"manifest", m.to_json()},
                               {"exponents", res.exponents},
                               {"kaplan_yorke", res.kaplan_yorke},
                               {"trace_average", res.trace_average},
                               {"closure_residual", res.closure_residual()}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  m.write_comments(out);
  out << "lambda1          " << format_table(res.exponents[0]) << '\n'
      << "lambda2          " << format_table(res.exponents[1]) << '\n'
      << "lambda3          " << format_table(res.exponents[2]) << '\n'
      << "kaplan_yorke     " << format_table(res.kaplan_yorke) << '\n'
      << "trace_average    " << format_table(res.trace_average) << '\n'
      << "closure_residual " << fmt::format("{:.3e}", res.closure_residual()) << '\n';
  return kExitOk;
}

// --- sweep ------------------------------------------------------------------

struct SweepOptions {
  ModelOptions model;
  InitialOptions init;
  LyapunovOptions lyap;
  double g_min = -1.2;
  double g_max = 1.2;
  int n_points = 121;
  int workers = 0;  // 0: environment or hardware default
  std::string out_path = "-";
  std::string plot_path;
};

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    int n = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n < 1)
      throw UsageError(fmt::format("{} must be a positive integer, got '{}'", kWorkersEnv, env));
    return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  if (!o.plot_path.empty() && o.out_path == "-") throw UsageError("--plot needs --out to name a file");
  SweepConfig cfg;
  cfg.g_min = o.g_min;
  cfg.g_max = o.g_max;
  cfg.n_points = o.n_points;
  cfg.base = o.model.params().base;
  cfg.lyapunov = o.lyap.config(o.init.state());
  cfg.workers = o.workers > 0 ? o.workers : default_workers();
  try {
    cfg.validate();
    validate(cfg.base);
    cfg.lyapunov.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rows = run_sweep(cfg);

  RunManifest m("sweep");
  o.model.record(m, false);
  o.init.record(m);
  o.lyap.record(m);
  m.add("g-min", o.g_min).add("g-max", o.g_max).add("n-points", o.n_points).add("workers", cfg.workers);
  m.add("out", o.out_path);
  if (!o.plot_path.empty()) m.add("plot", o.plot_path);
  m.set_wall_seconds(seconds_since(start));

  emit(o.out_path, out, [&](std::ostream& os) {
    m.write_comments(os);
    os << "g,lambda1,lambda2,lambda3,status\n";
    for (const auto& r : rows)
      os << format_exact(r.g) << ',' << format_exact(r.full_spectrum[0]) << ',' << format_exact(r.full_spectrum[1])
         << ',' << format_exact(r.full_spectrum[2]) << ',' << to_string(r.status) << '\n';
  });
  if (!o.plot_path.empty())
    write_text_file(o.plot_path,
                    sweep_plot_script(o.out_path, o.plot_path,
                                      fmt::format("largest Lyapunov exponent, a={} b={} c={}", o.model.a, o.model.b,
                                                  o.model.c)));
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyCmdOptions {
  ModelOptions model;
  std::uint64_t seed = 20180417;
  int samples = 100;
  bool corrupt = false;
};

int cmd_verify(const VerifyCmdOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  VerifyOptions vo;
  vo.params = o.model.params().base;
  vo.seed = o.seed;
  vo.samples = o.samples;
  vo.corrupt = o.corrupt;
  VerifyReport report;
  try {
    report = run_identity_suite(vo);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  RunManifest m("verify");
  o.model.record(m, false);
  m.add("seed", std::to_string(o.seed)).add("samples", o.samples);
  m.set_wall_seconds(seconds_since(start));
  m.write_comments(out);

  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  int failed = 0;
  for (const auto& c : report.checks) {
    if (c.skipped) {
      out << fmt::format("SKIP  {}\n", c.name);
      continue;
    }
    if (!c.passed) ++failed;
    out << fmt::format("{}  {:<50} max residual {:.3e} (threshold {:.0e})\n", c.passed ? "PASS" : "FAIL", c.name,
                       c.residual, c.threshold);
  }
  if (failed == 0) {
    out << fmt::format("all {} checks passed\n", report.checks.size());
    return kExitOk;
  }
  out << fmt::format("{} of {} checks failed\n", failed, report.checks.size());
  return kExitVerifyFailed;
}

// --- config files -----------------------------------------------------------

// Reads flat "key = value" lines ('#' starts a comment) and returns them as
// "--key=value" tokens.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos || key == "config")
      throw UsageError(fmt::format("{}:{}: expected 'key = value'", path, lineno));
    tokens.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return tokens;
}

// Splices config-file tokens in right after the subcommand name so that any
// flag given on the command line, which comes later, wins.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file argument");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    const auto t = read_config(path);
    from_file.insert(from_file.end(), t.begin(), t.end());
  }
  if (from_file.empty()) return rest;
  const auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (sub == rest.end()) throw UsageError("--config must follow a subcommand");
  rest.insert(sub + 1, from_file.begin(), from_file.end());
  return rest;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integrable deformations of the T system: simulation, equilibria, Lyapunov spectra, sweeps"};
  app.name("tdeform");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  // Later values win, which is how command-line flags override a config file.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const auto add_config_flag = [](CLI::App* sub) {
    // Consumed by expand_config before parsing; declared here for --help.
    sub->add_option("--config", "read 'key = value' defaults from a file; flags override it");
  };

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "integrate the deformed system and write a trajectory CSV");
  sim.model.add_to(s);
  sim.init.add_to(s);
  s->add_option("--t-end", sim.t_end, "end time")->capture_default_str();
  sim.dt_opt = s->add_option("--dt", sim.dt, "fixed RK4 step")->capture_default_str();
  sim.tol_opt = s->add_option("--tol", sim.tol, "adaptive 8(5,3) integration at this tolerance instead of RK4");
  sim.dt_opt->excludes(sim.tol_opt);
  s->add_option("--transient", sim.transient, "omit samples before this time")->capture_default_str();
  s->add_option("--sample-every", sim.sample_every, "output spacing in time units; 0 writes every step")
      ->capture_default_str();
  s->add_option("--out", sim.out_path, "CSV path, '-' for stdout")->required();
  s->add_option("--plot", sim.plot_path, "also write a gnuplot script here");
  add_config_flag(s);

  EquilibriaOptions eq;
  auto* e = app.add_subcommand("equilibria", "equilibria, eigenvalues and their classification");
  eq.model.add_to(e);
  e->add_option("--tol", eq.tol, "Newton residual tolerance")->capture_default_str();
  e->add_flag("--json", eq.json, "machine-readable output");
  add_config_flag(e);

  LyapunovCmdOptions ly;
  auto* l = app.add_subcommand("lyapunov", "Lyapunov spectrum and Kaplan-Yorke dimension");
  ly.model.add_to(l);
  ly.init.add_to(l);
  ly.lyap.add_to(l);
  l->add_option("--field", ly.field, "vector field")
      ->check(CLI::IsMember({"particular", "linear-test"}))
      ->capture_default_str();
  l->add_option("--history", ly.history_path, "write the running estimates to this CSV");
  l->add_flag("--json", ly.json, "machine-readable output");
  add_config_flag(l);

  SweepOptions sw;
  auto* w = app.add_subcommand("sweep", "largest Lyapunov exponent over a grid of g");
  sw.model.add_to(w, false);
  sw.init.add_to(w);
  sw.lyap.add_to(w);
  w->add_option("--g-min", sw.g_min, "first grid value")->capture_default_str();
  w->add_option("--g-max", sw.g_max, "last grid value")->capture_default_str();
  w->add_option("--n-points", sw.n_points, "number of grid points (>= 2)")->capture_default_str();
  w->add_option("--workers", sw.workers,
                fmt::format("worker threads (default: ${} or the hardware thread count)", kWorkersEnv));
  w->add_option("--out", sw.out_path, "CSV path, '-' for stdout")->capture_default_str();
  w->add_option("--plot", sw.plot_path, "also write a gnuplot script here");
  add_config_flag(w);

  VerifyCmdOptions ve;
  auto* v = app.add_subcommand("verify", "check the conservation and deformation identities");
  ve.model.add_to(v, false);
  v->add_option("--seed", ve.seed, "random seed")->capture_default_str();
  v->add_option("--samples", ve.samples, "random points and specs per check")->capture_default_str();
  v->add_flag("--corrupt", ve.corrupt)->group("");  // test hook: must make the suite fail
  add_config_flag(v);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::vector<char*> argv;
    std::string prog = "tdeform";
    argv.push_back(prog.data());
    for (auto& a : args) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& pe) {
      const int code = app.exit(pe, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }

    if (s->parsed()) return cmd_simulate(sim, out);
    if (e->parsed()) return cmd_equilibria(eq, out);
    if (l->parsed()) return cmd_lyapunov(ly, out);
    if (w->parsed()) {
      if (w->get_option("--workers")->count() > 0 && sw.workers < 1) throw UsageError("--workers must be >= 1");
      return cmd_sweep(sw, out);
    }
    if (v->parsed()) return cmd_verify(ve, out);
    return kExitUsage;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& ex) {
    err << "numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  } catch (const NewtonMismatch& ex) {
    err << "numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace tdeform::cli
