#include "spfit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "parallel.hpp"
#include "spfit/error.hpp"

namespace spfit {

namespace {

// Solution and both components at one point, sharing the forced integral.
class NodalOracle {
 public:
  explicit NodalOracle(const ProblemSpec& p)
      : u0_(p.u0()), v0_(p.reduced_initial_value()), constant_(p.constant_coefficients()) {
    if (constant_) {
      rate_ = p.a()(0.0) / p.eps();
    } else {
      quadrature_ = std::make_unique<IntegratingFactorQuadrature>(p);
    }
  }

  struct Values {
    std::vector<double> u, v, w;
  };

  Values at_nodes(std::span<const double> nodes) const {
    const std::size_t n = nodes.size();
    Values out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    std::vector<double> forced;
    if (!constant_) forced = quadrature_->forced_response_at_nodes(nodes);
    for (std::size_t j = 0; j < n; ++j) {
      if (constant_) {
        const double w = (u0_ - v0_) * std::exp(-rate_ * nodes[j]);
        out.u[j] = v0_ + w;
        out.v[j] = v0_;
        out.w[j] = w;
      } else {
        const double decay = quadrature_->decay(nodes[j]);
        out.u[j] = decay * u0_ + forced[j];
        out.v[j] = decay * v0_ + forced[j];
        out.w[j] = (u0_ - v0_) * decay;
      }
    }
    return out;
  }

  double accuracy(std::size_t intervals) const {
    return constant_ ? 0.0 : quadrature_->nodal_accuracy_bound(intervals);
  }

 private:
  double u0_;
  double v0_;
  bool constant_;
  double rate_ = 0.0;
  std::unique_ptr<IntegratingFactorQuadrature> quadrature_;
};

void require_resolution(double accuracy, double expected_scale) {
  if (accuracy > 0.01 * expected_scale) {
    std::ostringstream os;
    os << "oracle accuracy " << accuracy << " is too coarse for an error of scale " << expected_scale;
    throw OracleTooCoarse(os.str());
  }
}

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const QuadratureError& e) {
    throw QuadratureError(context + e.what(), e.achieved());
  } catch (const OracleTooCoarse& e) {
    throw OracleTooCoarse(context + e.what());
  } catch (const OracleError& e) {
    throw OracleError(context + e.what());
  } catch (const InvalidMesh& e) {
    throw InvalidMesh(context + e.what());
  } catch (const InvalidProblem& e) {
    throw InvalidProblem(context + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(context + e.what());
  }
}

ErrorTable empty_table(const ProblemSpec& p, std::span<const double> eps_grid,
                       std::span<const std::size_t> n_grid, const MeshSpec& mesh, SchemeKind scheme,
                       std::uint64_t seed) {
  ErrorTable t;
  t.problem = p.name();
  t.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  t.n_grid.assign(n_grid.begin(), n_grid.end());
  t.errors.assign(eps_grid.size(), std::vector<double>(n_grid.size(), 0.0));
  t.mesh = mesh;
  t.scheme = scheme;
  t.seed = seed;
  return t;
}

void finish_table(ErrorTable& t) {
  t.uniform_errors.assign(t.n_grid.size(), 0.0);
  for (const auto& row : t.errors) {
    for (std::size_t k = 0; k < row.size(); ++k) t.uniform_errors[k] = std::max(t.uniform_errors[k], row[k]);
  }
  t.orders = uniform_order(t.n_grid, t.uniform_errors).orders;
}

}  // namespace

std::vector<double> power_of_two_grid(int min_exp, int max_exp) {
  if (min_exp > max_exp) throw InvalidArgument("eps grid: min exponent exceeds max exponent");
  std::vector<double> grid;
  for (int e = max_exp; e >= min_exp; --e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

std::vector<std::size_t> doubling_grid(std::size_t n_min, std::size_t n_max) {
  if (n_min == 0 || n_min > n_max) throw InvalidArgument("N grid: need 1 <= n_min <= n_max");
  std::vector<std::size_t> grid;
  for (std::size_t n = n_min; n <= n_max; n *= 2) grid.push_back(n);
  return grid;
}

double nodal_error(const DiscreteSolution& U, const SolutionFunction& u) {
  const auto nodes = U.mesh().nodes();
  double err = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) err = std::max(err, std::abs(U[j] - u(nodes[j])));
  return err;
}

double nodal_error(const DiscreteSolution& U, const SolutionFunction& u, double expected_scale) {
  require_resolution(u.accuracy_estimate(), expected_scale);
  return nodal_error(U, u);
}

OrderReport uniform_order(std::span<const std::size_t> n_grid, std::span<const double> uniform_errors) {
  if (n_grid.size() != uniform_errors.size()) {
    throw InvalidArgument("uniform_order: grid and error lengths differ");
  }
  OrderReport report;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    report.c_hat = std::max(report.c_hat, static_cast<double>(n_grid[k]) * uniform_errors[k]);
  }
  for (std::size_t k = 0; k + 1 < n_grid.size(); ++k) {
    const bool doubling = n_grid[k + 1] == 2 * n_grid[k];
    if (!doubling || uniform_errors[k + 1] == 0.0 || uniform_errors[k] == 0.0) {
      report.orders.emplace_back();
      report.undefined.push_back(k);
    } else {
      report.orders.emplace_back(std::log2(uniform_errors[k] / uniform_errors[k + 1]));
    }
  }
  return report;
}

OrderReport uniform_order(const ErrorTable& table) {
  return uniform_order(table.n_grid, table.uniform_errors);
}

ConvergenceStudy run_convergence_study(const ProblemSpec& p, std::span<const double> eps_grid,
                                       std::span<const std::size_t> n_grid, const MeshSpec& mesh,
                                       SchemeKind scheme, std::uint64_t seed, bool components) {
  if (eps_grid.empty() || n_grid.empty()) throw InvalidArgument("error table grids must be nonempty");
  for (std::size_t k = 1; k < n_grid.size(); ++k) {
    if (n_grid[k] <= n_grid[k - 1]) throw InvalidArgument("N grid must be strictly increasing");
  }

  ConvergenceStudy study;
  study.total = empty_table(p, eps_grid, n_grid, mesh, scheme, seed);
  if (components) {
    study.smooth = study.total;
    study.singular = study.total;
  }

  std::vector<ProblemSpec> problems;
  std::vector<std::unique_ptr<NodalOracle>> oracles;
  for (double eps : eps_grid) {
    problems.push_back(p.with_eps(eps));
    oracles.push_back(std::make_unique<NodalOracle>(problems.back()));
  }
  std::vector<Mesh> meshes;
  for (std::size_t N : n_grid) meshes.push_back(make_mesh(mesh, N, p.end_time(), seed));

  const std::size_t cols = n_grid.size();
  const std::size_t cells = eps_grid.size() * cols;
  std::vector<double> split_residual(cells, 0.0);
  std::vector<char> stable(cells, 1);

  detail::parallel_for(cells, [&](std::size_t cell) {
    const std::size_t i = cell / cols;
    const std::size_t k = cell % cols;
    try {
      const ProblemSpec& pe = problems[i];
      const NodalOracle& oracle = *oracles[i];
      const Mesh& m = meshes[k];
      const DiscreteSolution U = solve(pe, m, scheme);
      stable[cell] = check_discrete_stability(U).passed ? 1 : 0;

      std::optional<DiscreteDecomposition> parts;
      if (components) parts.emplace(discrete_decompose(pe, m, scheme));

      double err = 0.0, err_v = 0.0, err_w = 0.0, split = 0.0;
      const auto nodes = m.nodes();
      const NodalOracle::Values exact = oracle.at_nodes(nodes);
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        err = std::max(err, std::abs(U[j] - exact.u[j]));
        if (parts) {
          err_v = std::max(err_v, std::abs(parts->smooth[j] - exact.v[j]));
          err_w = std::max(err_w, std::abs(parts->singular[j] - exact.w[j]));
          split = std::max(split, std::abs(parts->smooth[j] + parts->singular[j] - U[j]));
        }
      }
      require_resolution(oracle.accuracy(m.intervals()), err);
      study.total.errors[i][k] = err;
      if (parts) {
        study.smooth->errors[i][k] = err_v;
        study.singular->errors[i][k] = err_w;
        const double scale = U.max_abs();
        split_residual[cell] = scale > 0.0 ? split / scale : split;
      }
    } catch (...) {
      std::ostringstream os;
      os << "(eps=" << eps_grid[i] << ", N=" << n_grid[k] << "): ";
      rethrow_with_context(os.str());
    }
  });

  study.solves = cells;
  for (std::size_t c = 0; c < cells; ++c) {
    if (!stable[c]) ++study.stability_failures;
    study.max_split_residual = std::max(study.max_split_residual, split_residual[c]);
  }
  finish_table(study.total);
  if (components) {
    finish_table(*study.smooth);
    finish_table(*study.singular);
  }
  return study;
}

ErrorTable build_error_table(const ProblemSpec& p, std::span<const double> eps_grid,
                             std::span<const std::size_t> n_grid, const MeshSpec& mesh,
                             SchemeKind scheme, std::uint64_t seed) {
  return run_convergence_study(p, eps_grid, n_grid, mesh, scheme, seed, false).total;
}

UniformConvergenceCheck check_uniform_convergence(const ErrorTable& table, double min_order,
                                                  std::size_t n_from, double max_ratio) {
  UniformConvergenceCheck check;
  check.min_order_seen = std::numeric_limits<double>::infinity();
  check.orders_ok = true;
  for (std::size_t k = 0; k < table.orders.size(); ++k) {
    if (table.n_grid[k] < n_from) continue;
    if (!table.orders[k]) {
      check.orders_ok = false;
      continue;
    }
    check.min_order_seen = std::min(check.min_order_seen, *table.orders[k]);
    if (*table.orders[k] < min_order) check.orders_ok = false;
  }
  // nothing to judge is not a pass
  if (!std::isfinite(check.min_order_seen)) check.orders_ok = false;

  double top = 0.0;
  double bottom = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < table.n_grid.size(); ++k) {
    const double scaled = static_cast<double>(table.n_grid[k]) * table.uniform_errors[k];
    top = std::max(top, scaled);
    if (table.n_grid[k] >= n_from) bottom = std::min(bottom, scaled);
  }
  check.constant_ratio = bottom > 0.0 ? top / bottom : std::numeric_limits<double>::infinity();
  check.ratio_ok = check.constant_ratio <= max_ratio;
  return check;
}

std::vector<double> constants_per_eps(const ErrorTable& table) {
  std::vector<double> out;
  for (const auto& row : table.errors) {
    double c = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) c = std::max(c, static_cast<double>(table.n_grid[k]) * row[k]);
    out.push_back(c);
  }
  return out;
}

double stability_ratio(std::span<const double> eps_grid, std::span<const double> constants,
                       double reference_eps) {
  double reference = -1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (eps_grid[i] == reference_eps) reference = constants[i];
    if (eps_grid[i] <= reference_eps) worst = std::max(worst, constants[i]);
  }
  if (reference < 0.0) throw InvalidArgument("reference eps is not on the grid");
  if (reference == 0.0) return worst == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return worst / reference;
}

std::vector<BoundReport> check_layer_bounds(const ProblemSpec& p, int k_max,
                                            std::span<const double> eps_grid) {
  if (k_max < 0 || k_max > 2) throw InvalidArgument("layer bounds are defined for k = 0, 1, 2");
  std::vector<double> default_grid;
  if (eps_grid.empty()) {
    default_grid = power_of_two_grid(-20, -4);
    eps_grid = default_grid;
  }
  const Coefficient& a = p.a();
  const Coefficient& f = p.f();
  const double alpha = p.alpha();
  const double w0 = p.u0() - p.reduced_initial_value();

  const std::size_t bounds = static_cast<std::size_t>(k_max) + 1;
  std::vector<std::vector<double>> w_const(bounds), v_const(bounds);

  for (double eps : eps_grid) {
    const ProblemSpec pe = p.with_eps(eps);
    const SolutionFunction v = continuous_decomposition(pe).smooth;
    std::vector<double> cw(bounds, 0.0), cv(bounds, 0.0);
    for (double t : layer_sample_points(eps, p.end_time(), 64)) {
      // |w^(k)| eps^k / e^{-alpha t/eps} = |w0| e^{-(A(t) - alpha t)/eps} |g_k(t)| with
      // g_0 = 1, g_1 = a, g_2 = a^2 - eps a'; from w' = -(a/eps) w and
      // w'' = -(a' w + a w') / eps. This form does not underflow in the layer tail.
      const double envelope = std::abs(w0) * std::exp(-(p.antiderivative(t) - alpha * t) / eps);
      const double at = a(t);
      const double g[3] = {1.0, at, at * at - eps * a.derivative(t)};
      // v' and v'' from the differential equation and its derivative.
      const double vt = v(t);
      const double v1 = (f(t) - at * vt) / eps;
      const double v2 = (f.derivative(t) - a.derivative(t) * vt - at * v1) / eps;
      const double vk[3] = {std::abs(vt), std::abs(v1), eps * std::abs(v2)};
      for (std::size_t k = 0; k < bounds; ++k) {
        cw[k] = std::max(cw[k], envelope * std::abs(g[k]));
        cv[k] = std::max(cv[k], vk[k]);
      }
    }
    for (std::size_t k = 0; k < bounds; ++k) {
      w_const[k].push_back(cw[k]);
      v_const[k].push_back(cv[k]);
    }
  }

  std::vector<BoundReport> reports;
  auto add = [&](std::string name, const std::vector<double>& constants, std::string note) {
    BoundReport r;
    r.name = std::move(name);
    for (std::size_t i = 0; i < eps_grid.size(); ++i) r.samples.push_back({eps_grid[i], constants[i]});
    r.inferred_constant = *std::max_element(constants.begin(), constants.end());
    r.ratio = stability_ratio(eps_grid, constants, eps_grid.front());
    r.checked = constants.size();
    r.passed = r.ratio < 10.0;
    r.note = std::move(note);
    reports.push_back(std::move(r));
  };
  for (std::size_t k = 0; k < bounds; ++k) {
    add("singular_w" + std::to_string(k), w_const[k],
        "|w^(" + std::to_string(k) + ")(t)| <= C eps^-" + std::to_string(k) + " exp(-alpha t/eps)");
  }
  for (std::size_t k = 0; k < bounds; ++k) {
    add("smooth_v" + std::to_string(k), v_const[k],
        k < 2 ? "|v|_" + std::to_string(k) + " <= C" : std::string("|v|_2 <= C / eps"));
  }
  return reports;
}

BoundReport check_sandwich(const ProblemSpec& p, const Mesh& m) {
  const MeshValidation valid = validate(m);
  if (!valid.ok()) throw InvalidMesh(valid.summary());
  if (std::abs(m.end_time() - p.end_time()) > 1e-12 * p.end_time()) {
    throw InvalidMesh("mesh and problem end times differ");
  }
  constexpr int kInteriorSamples = 64;
  constexpr double kTolerance = 1e-12;
  constexpr double kTiny = 1e-280;

  const SolutionFunction w = continuous_decomposition(p).singular;
  BoundReport report;
  report.name = "interval_sandwich";
  report.inferred_constant = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  std::size_t reversed_violations = 0;

  double w_prev = w(m.node(0));
  for (std::size_t j = 1; j <= m.intervals(); ++j) {
    const double w_next = w(m.node(j));
    const double lo_t = m.node(j - 1);
    const double h = m.width(j);
    double a_min = std::numeric_limits<double>::infinity();
    double a_max = -a_min;
    for (int i = 0; i <= kInteriorSamples + 1; ++i) {
      const double at = p.a()(lo_t + h * i / (kInteriorSamples + 1));
      a_min = std::min(a_min, at);
      a_max = std::max(a_max, at);
    }
    if (std::abs(w_prev) < kTiny || std::abs(w_next) < kTiny) {
      ++report.skipped;
      w_prev = w_next;
      continue;
    }
    ++report.checked;
    const double rho = h / p.eps();
    const double ratio = w_next / w_prev;
    const double lower = std::exp(-rho * a_max);
    const double upper = std::exp(-rho * a_min);
    const bool ok = ratio >= lower * (1.0 - kTolerance) && ratio <= upper * (1.0 + kTolerance);
    if (!ok) ++violations;
    const bool reversed_ok = ratio >= upper * (1.0 - kTolerance) && ratio <= lower * (1.0 + kTolerance);
    if (!reversed_ok) ++reversed_violations;
    const double margin = std::min(ratio - lower, upper - ratio) / upper;
    report.samples.push_back({m.node(j), margin});
    report.inferred_constant = std::min(report.inferred_constant, margin);
    w_prev = w_next;
  }
  if (report.checked == 0) report.inferred_constant = 0.0;
  report.passed = violations == 0;
  std::ostringstream note;
  note << "w_j/w_{j-1} in [exp(-rho_j max a), exp(-rho_j min a)] holds on "
       << report.checked - violations << " of " << report.checked << " intervals; "
       << "the reversed orientation [exp(-rho_j min a), exp(-rho_j max a)] fails on "
       << reversed_violations << " of " << report.checked;
  if (report.checked == 0) note << " (vacuous: w vanishes or underflows on every interval)";
  report.note = note.str();
  return report;
}

}  // namespace spfit
