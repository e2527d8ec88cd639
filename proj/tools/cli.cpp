#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "spfit/analysis.hpp"
#include "spfit/csv.hpp"
#include "spfit/error.hpp"
#include "spfit/mesh.hpp"
#include "spfit/problem.hpp"
#include "spfit/reference.hpp"
#include "spfit/scheme.hpp"

namespace spfit::cli {

namespace {

constexpr double kVerifyEps = 1.0 / 1024.0;
constexpr std::size_t kVerifyIntervals = 32;
constexpr std::size_t kSigmaSamples = 1000000;

// CSV goes to the caller's stream for "-", otherwise to a file we own.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw InvalidArgument("cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

ProblemSpec make_problem(const RunConfig& cfg, double eps) {
  ProblemSpec p = catalog_problem(cfg.problem, eps);
  if (cfg.u0) p = p.with_initial_value(*cfg.u0);
  return p;
}

bool uses_mesh_file(const RunConfig& cfg) { return !cfg.mesh_file.empty() || cfg.mesh == "custom"; }

MeshSpec mesh_spec(const RunConfig& cfg) {
  MeshSpec spec;
  spec.kind = parse_mesh_kind(cfg.mesh);
  spec.spread = cfg.spread;
  spec.grading = cfg.grading;
  return spec;
}

Mesh build_mesh(const RunConfig& cfg, std::size_t N, double T) {
  if (uses_mesh_file(cfg)) {
    if (cfg.mesh_file.empty()) throw InvalidArgument("mesh 'custom' needs --mesh-file");
    Mesh m = read_mesh_file(cfg.mesh_file, cfg.c_mesh);
    const MeshValidation report = validate(m);
    if (!report.ok()) throw InvalidMesh("mesh file '" + cfg.mesh_file + "': " + report.summary());
    return m;
  }
  return make_mesh(mesh_spec(cfg), N, T, cfg.seed);
}

std::optional<double> single_eps(const RunConfig& cfg) {
  if (cfg.eps) return cfg.eps;
  if (cfg.eps_min_exp == cfg.eps_max_exp) return std::ldexp(1.0, cfg.eps_min_exp);
  return std::nullopt;
}

std::optional<std::size_t> single_n(const RunConfig& cfg) {
  if (cfg.n) return cfg.n;
  if (cfg.n_min == cfg.n_max) return cfg.n_min;
  return std::nullopt;
}

double require_single_eps(const RunConfig& cfg) {
  const auto eps = single_eps(cfg);
  if (!eps) throw InvalidArgument(cfg.command + " needs one eps: pass --eps or equal --eps-min-exp/--eps-max-exp");
  return *eps;
}

std::size_t require_single_n(const RunConfig& cfg) {
  if (uses_mesh_file(cfg)) return 0;
  const auto n = single_n(cfg);
  if (!n) throw InvalidArgument(cfg.command + " needs one N: pass --n or equal --n-min/--n-max");
  return *n;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = make_problem(cfg, require_single_eps(cfg));
  const Mesh m = build_mesh(cfg, require_single_n(cfg), p.end_time());
  const DiscreteSolution U = solve(p, m, parse_scheme(cfg.scheme));
  const SolutionFunction u = validated_reference(p);
  Output sink(cfg.out, out);
  write_solution_csv(sink.get(), U, u);
  return kOk;
}

int cmd_decompose(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = make_problem(cfg, require_single_eps(cfg));
  const Mesh m = build_mesh(cfg, require_single_n(cfg), p.end_time());
  const SchemeKind s = parse_scheme(cfg.scheme);
  const DiscreteSolution U = solve(p, m, s);
  const DiscreteDecomposition parts = discrete_decompose(p, m, s);
  validated_reference(p);
  const Decomposition exact = continuous_decomposition(p);
  Output sink(cfg.out, out);
  write_decomposition_csv(sink.get(), U, parts, exact);
  return kOk;
}

int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (uses_mesh_file(cfg)) throw InvalidArgument("converge needs a generated mesh family, not a mesh file");
  if (cfg.eps_min_exp > cfg.eps_max_exp) throw InvalidArgument("--eps-min-exp exceeds --eps-max-exp");
  std::vector<double> eps_grid =
      cfg.eps ? std::vector<double>{*cfg.eps} : power_of_two_grid(cfg.eps_min_exp, cfg.eps_max_exp);
  std::vector<std::size_t> n_grid =
      cfg.n ? std::vector<std::size_t>{*cfg.n} : doubling_grid(cfg.n_min, cfg.n_max);
  const ProblemSpec p = make_problem(cfg, eps_grid.front());
  const ErrorTable table =
      build_error_table(p, eps_grid, n_grid, mesh_spec(cfg), parse_scheme(cfg.scheme), cfg.seed);
  {
    Output sink(cfg.out, out);
    write_error_table_csv(sink.get(), table);
  }
  if (!cfg.assert_orders) return kOk;
  const UniformConvergenceCheck check = check_uniform_convergence(table);
  err << "assert: min order for N >= 64 is " << format_double(check.min_order_seen)
      << (check.orders_ok ? " (>= 0.85)" : " (below 0.85)") << "\n";
  return check.orders_ok ? kOk : kConvergenceAssert;
}

const char* verdict(bool passed) { return passed ? "PASS" : "FAIL"; }

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const double eps = single_eps(cfg).value_or(kVerifyEps);
  const ProblemSpec p = make_problem(cfg, eps);
  const std::size_t N = uses_mesh_file(cfg) ? 0 : single_n(cfg).value_or(kVerifyIntervals);
  const Mesh m = build_mesh(cfg, N, p.end_time());
  const SchemeKind s = parse_scheme(cfg.scheme);
  {
    const MeshValidation report = validate(m);
    if (!report.ok()) throw InvalidMesh(report.summary());
  }

  Output sink(cfg.out, out);
  std::ostream& os = sink.get();
  os << "problem " << p.name() << " eps=" << format_double(eps) << " N=" << m.intervals()
     << " mesh=" << mesh_kind_name(m.kind()) << " scheme=" << scheme_name(s) << "\n";
  os << "prng " << kMeshPrng << " seed=" << cfg.seed << "\n";

  bool all = true;
  const MaxPrincipleReport mp = check_discrete_max_principle(p, m, s, cfg.trials, cfg.seed);
  if (mp.skipped()) {
    os << "SKIP max_principle trials=0\n";
  } else {
    all = all && mp.passed();
    os << verdict(mp.passed()) << " max_principle trials=" << mp.trials << " violations=" << mp.violations
       << " worst_margin=" << format_double(mp.worst_margin) << "\n";
  }

  const DiscreteStabilityReport st = check_discrete_stability(solve(p, m, s));
  all = all && st.passed;
  os << verdict(st.passed) << " stability max_abs=" << format_double(st.max_abs_solution)
     << " bound=" << format_double(st.bound) << "\n";

  const FittingFactorSweep sweep = sweep_fitting_factor(kSigmaSamples, cfg.seed);
  all = all && sweep.passed();
  os << verdict(sweep.passed()) << " sigma_sweep samples=" << sweep.samples
     << " range_violations=" << sweep.range_violations << " bound_violations=" << sweep.bound_violations
     << "\n";

  for (const BoundReport& r : check_layer_bounds(p)) {
    all = all && r.passed;
    os << verdict(r.passed) << " layer_bound " << r.name << " C=" << format_double(r.inferred_constant)
       << " ratio=" << format_double(r.ratio) << "\n";
  }

  const BoundReport sw = check_sandwich(p, m);
  all = all && sw.passed;
  os << verdict(sw.passed) << " sandwich checked=" << sw.checked << " skipped=" << sw.skipped;
  if (!sw.note.empty()) os << " note=\"" << sw.note << "\"";
  os << "\n";

  os << (all ? "verify: all checks passed" : "verify: some checks failed") << "\n";
  return all ? kOk : kCheckFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Fitted backward Euler for eps u' + a(t) u = f(t)", "spfit"};
  app.set_config("--config", "", "key=value config file; flags override it");
  app.add_option("--problem", cfg.problem, "catalog problem")->capture_default_str();
  app.add_option("--scheme", cfg.scheme, "fitted|standard")->capture_default_str();
  app.add_option("--mesh", cfg.mesh, "uniform|random|graded|custom")->capture_default_str();
  app.add_option("--mesh-file", cfg.mesh_file, "node file for a custom mesh");
  app.add_option("--c-mesh", cfg.c_mesh, "mesh constant recorded for a custom mesh")->capture_default_str();
  app.add_option("--spread", cfg.spread, "random mesh spread in [0, 1)")->capture_default_str();
  app.add_option("--grading", cfg.grading, "graded mesh width ratio")->capture_default_str();
  app.add_option("--eps-min-exp", cfg.eps_min_exp)->capture_default_str();
  app.add_option("--eps-max-exp", cfg.eps_max_exp)->capture_default_str();
  app.add_option("--eps", cfg.eps, "single eps");
  app.add_option("--n-min", cfg.n_min)->capture_default_str();
  app.add_option("--n-max", cfg.n_max)->capture_default_str();
  app.add_option("--n", cfg.n, "single N");
  app.add_option("--seed", cfg.seed)->capture_default_str();
  app.add_option("--out", cfg.out, "output path, - for stdout")->capture_default_str();
  app.add_flag("--assert", cfg.assert_orders, "exit 4 unless every order for N >= 64 is at least 0.85");
  app.add_option("--trials", cfg.trials, "max-principle trials for verify")->capture_default_str();
  app.add_option("--u0", cfg.u0, "override the problem's initial value");

  app.require_subcommand(1, 1);
  for (const char* name : {"solve", "converge", "decompose", "verify"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (cfg.command == "solve") return cmd_solve(cfg, out);
    if (cfg.command == "decompose") return cmd_decompose(cfg, out);
    if (cfg.command == "converge") return cmd_converge(cfg, out, err);
    return cmd_verify(cfg, out);
  } catch (const OracleError& e) {
    err << "oracle error: " << e.what() << "\n";
    return kOracleError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace spfit::cli
