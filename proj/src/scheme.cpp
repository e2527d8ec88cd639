#include "spfit/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "spfit/error.hpp"

namespace spfit {

namespace {

constexpr double kSmallArgument = 1e-2;
constexpr double kLargeArgument = 30.0;

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_mesh_fits_problem(const ProblemSpec& p, const Mesh& m) {
  const MeshValidation report = validate(m);
  if (!report.ok()) throw InvalidMesh(report.summary());
  const double T = p.end_time();
  if (std::abs(m.end_time() - T) > 1e-12 * T) {
    std::ostringstream os;
    os << "mesh ends at " << m.end_time() << " but problem '" << p.name() << "' ends at " << T;
    throw InvalidMesh(os.str());
  }
}

}  // namespace

std::string_view scheme_name(SchemeKind kind) {
  return kind == SchemeKind::fitted ? "fitted" : "standard";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "fitted") return SchemeKind::fitted;
  if (name == "standard") return SchemeKind::standard;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

double positive_decay(double x) {
  return std::max(std::exp(-x), std::numeric_limits<double>::denorm_min());
}

double fitting_factor(double a_j, double rho_j) {
  if (!(a_j > 0.0)) throw DomainError("fitting factor needs a_j > 0");
  if (!(rho_j >= 0.0)) throw DomainError("fitting factor needs rho_j >= 0");
  const double x = a_j * rho_j;
  if (x == 0.0) return 1.0;
  if (x < kSmallArgument) return x / std::expm1(x);
  if (x < kLargeArgument) return x / (std::exp(x) - 1.0);
  // x e^{-x} / (1 - e^{-x}); the log form delays underflow of x e^{-x}.
  const double value = std::exp(std::log(x) - x) / -std::expm1(-x);
  return std::max(value, std::numeric_limits<double>::denorm_min());
}

double exp_difference(double p, double q) {
  const double lo = std::min(p, q);
  return std::exp(-lo) * -std::expm1(-std::abs(p - q));
}

double exp_difference_bound(double p, double q) {
  return std::abs(p - q) * std::exp(-std::min(p, q));
}

StepCoefficients step_coefficients(SchemeKind scheme, double a_j, double h_j, double eps) {
  const double rho = h_j / eps;
  if (scheme == SchemeKind::fitted) {
    const double x = a_j * rho;
    return {positive_decay(x), -std::expm1(-x) / a_j};
  }
  const double denom = 1.0 + a_j * rho;
  return {1.0 / denom, rho / denom};
}

DiscreteSolution::DiscreteSolution(Mesh mesh, std::vector<double> values, SchemeKind scheme,
                                   ProblemSpec problem)
    : mesh_(std::move(mesh)), values_(std::move(values)), scheme_(scheme), problem_(std::move(problem)) {
  if (values_.size() != mesh_.nodes().size()) {
    throw InvalidArgument("discrete solution length does not match its mesh");
  }
}

double DiscreteSolution::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> march(const ProblemSpec& p, const Mesh& m, SchemeKind s,
                          std::span<const double> rhs, double initial) {
  const std::size_t N = m.intervals();
  if (rhs.size() != N) throw InvalidArgument("right-hand side must hold one value per interval");
  std::vector<double> values(N + 1);
  values[0] = initial;
  for (std::size_t j = 1; j <= N; ++j) {
    const StepCoefficients c = step_coefficients(s, p.a()(m.node(j)), m.width(j), p.eps());
    values[j] = c.carry * values[j - 1] + c.source * rhs[j - 1];
  }
  return values;
}

std::vector<double> apply_operator(const ProblemSpec& p, const Mesh& m, SchemeKind s,
                                   std::span<const double> psi) {
  const std::size_t N = m.intervals();
  if (psi.size() != N + 1) throw InvalidArgument("mesh function must hold N+1 values");
  std::vector<double> out(N);
  for (std::size_t j = 1; j <= N; ++j) {
    const double a_j = p.a()(m.node(j));
    const double h = m.width(j);
    const double sigma = s == SchemeKind::fitted ? fitting_factor(a_j, h / p.eps()) : 1.0;
    out[j - 1] = p.eps() * sigma * (psi[j] - psi[j - 1]) / h + a_j * psi[j];
  }
  return out;
}

std::vector<double> forcing_at_nodes(const ProblemSpec& p, const Mesh& m) {
  std::vector<double> f(m.intervals());
  for (std::size_t j = 1; j <= m.intervals(); ++j) f[j - 1] = p.f()(m.node(j));
  return f;
}

DiscreteSolution solve(const ProblemSpec& p, const Mesh& m, SchemeKind s) {
  check_mesh_fits_problem(p, m);
  std::vector<double> values = march(p, m, s, forcing_at_nodes(p, m), p.u0());
  return DiscreteSolution(m, std::move(values), s, p);
}

DiscreteDecomposition discrete_decompose(const ProblemSpec& p, const Mesh& m, SchemeKind s) {
  check_mesh_fits_problem(p, m);
  const double v0 = p.reduced_initial_value();
  const std::vector<double> f = forcing_at_nodes(p, m);
  const std::vector<double> zero(f.size(), 0.0);
  return DiscreteDecomposition{
      DiscreteSolution(m, march(p, m, s, f, v0), s, p.with_initial_value(v0)),
      DiscreteSolution(m, march(p, m, s, zero, p.u0() - v0), s, p.with_initial_value(p.u0() - v0)),
  };
}

MaxPrincipleReport check_discrete_max_principle(const ProblemSpec& p, const Mesh& m, SchemeKind s,
                                                std::size_t trials, std::uint64_t seed) {
  check_mesh_fits_problem(p, m);
  MaxPrincipleReport report;
  report.trials = trials;
  report.worst_margin = trials > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  std::mt19937_64 rng(seed);
  std::vector<double> rhs(m.intervals());
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // Mix exact zeros into the data so the boundary case Psi = 0 is exercised.
    const double initial = unit_uniform(rng) < 0.1 ? 0.0 : unit_uniform(rng);
    for (double& g : rhs) g = unit_uniform(rng) < 0.2 ? 0.0 : 2.0 * p.alpha() * unit_uniform(rng);
    const std::vector<double> psi = march(p, m, s, rhs, initial);
    double lowest = psi[0];
    double sup = 1.0;
    for (double v : psi) {
      lowest = std::min(lowest, v);
      sup = std::max(sup, std::abs(v));
    }
    const double margin = lowest / sup;
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-12) ++report.violations;
  }
  return report;
}

DiscreteStabilityReport check_discrete_stability(const DiscreteSolution& U) {
  const ProblemSpec& p = U.problem();
  double f_sup = 0.0;
  for (double f : forcing_at_nodes(p, U.mesh())) f_sup = std::max(f_sup, std::abs(f));
  DiscreteStabilityReport report;
  report.bound = std::max(std::abs(U[0]), f_sup / p.alpha());
  report.max_abs_solution = U.max_abs();
  report.passed = report.max_abs_solution <= report.bound * (1.0 + 1e-12);
  return report;
}

FittingFactorSweep sweep_fitting_factor(std::size_t samples, std::uint64_t seed) {
  FittingFactorSweep sweep;
  sweep.samples = samples;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = 0.5 + 3.5 * unit_uniform(rng);
    const double rho = std::pow(10.0, -6.0 + 12.0 * unit_uniform(rng));
    const double sigma = fitting_factor(a, rho);
    sweep.min_sigma = std::min(sweep.min_sigma, sigma);
    sweep.max_sigma = std::max(sweep.max_sigma, sigma);
    if (!(sigma > 0.0 && sigma < 1.0)) ++sweep.range_violations;
    if (!(1.0 - sigma <= std::min(1.0, 0.5 * a * rho))) ++sweep.bound_violations;
  }
  return sweep;
}

}  // namespace spfit
