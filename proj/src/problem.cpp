#include "spfit/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <utility>

#include "spfit/error.hpp"
#include "spfit/quadrature.hpp"

namespace spfit {

namespace {

constexpr std::size_t kCoefficientSamples = 1024;

// e^{-46} ~ 1e-20: the kernel tail beyond this is below double resolution
// of any bundled solution.
constexpr double kTauCutoff = 46.0;

// Panel breakpoints in tau, graded geometrically toward tau = 0.
constexpr std::array<double, 8> kTauBreaks = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, kTauCutoff};

}  // namespace

ProblemSpec::ProblemSpec(std::string name, Coefficient a, Coefficient f, double u0, double eps,
                         double T, double alpha)
    : name_(std::move(name)),
      a_(std::move(a)),
      f_(std::move(f)),
      u0_(u0),
      eps_(eps),
      T_(T),
      alpha_(alpha) {
  std::ostringstream err;
  if (!(eps_ > 0.0 && eps_ <= 1.0)) err << "eps must satisfy 0 < eps <= 1 (got " << eps_ << ")";
  else if (!(T_ > 0.0) || !std::isfinite(T_)) err << "T must be positive (got " << T_ << ")";
  else if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) err << "alpha must be positive (got " << alpha_ << ")";
  else if (!std::isfinite(u0_)) err << "u0 must be finite";
  if (err.tellp() > 0) throw InvalidProblem("problem '" + name_ + "': " + err.str());

  for (std::size_t i = 0; i <= kCoefficientSamples; ++i) {
    const double t = T_ * static_cast<double>(i) / static_cast<double>(kCoefficientSamples);
    const double at = a_(t);
    if (!(at >= alpha_)) {
      err << "a(" << t << ") = " << at << " is below alpha = " << alpha_;
      throw InvalidProblem("problem '" + name_ + "': " + err.str());
    }
  }
}

ProblemSpec ProblemSpec::with_eps(double eps) const {
  return ProblemSpec(name_, a_, f_, u0_, eps, T_, alpha_);
}

ProblemSpec ProblemSpec::with_initial_value(double u0) const {
  return ProblemSpec(name_, a_, f_, u0, eps_, T_, alpha_);
}

double ProblemSpec::forcing_sup(std::size_t samples) const {
  double sup = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = T_ * static_cast<double>(i) / static_cast<double>(samples);
    sup = std::max(sup, std::abs(f_(t)));
  }
  return sup;
}

std::vector<std::string> catalog_names() {
  return {"const_a1_f0", "steady", "const_a1_f1_u3", "var_linear", "var_sine"};
}

ProblemSpec catalog_problem(std::string_view name, double eps) {
  using C = Coefficient;
  const std::string key(name);
  if (key == "const_a1_f0") return ProblemSpec(key, C::constant(1.0), C(), 1.0, eps, 1.0, 1.0);
  if (key == "steady") return ProblemSpec(key, C::constant(2.0), C::constant(2.0), 1.0, eps, 1.0, 2.0);
  if (key == "const_a1_f1_u3") {
    return ProblemSpec(key, C::constant(1.0), C::constant(1.0), 3.0, eps, 1.0, 1.0);
  }
  if (key == "var_linear") {
    return ProblemSpec(key, C::linear_combination({{1.0, Basis::one}, {1.0, Basis::t}}),
                       C::linear_combination({{1.0, Basis::one}, {1.0, Basis::t2}}), 0.0, eps, 1.0,
                       1.0);
  }
  if (key == "var_sine") {
    return ProblemSpec(key, C::linear_combination({{2.0, Basis::one}, {1.0, Basis::sin_pi}}),
                       C::linear_combination({{1.0, Basis::exp}}), 2.0, eps, 1.0, 2.0);
  }
  throw InvalidArgument("unknown problem '" + key + "'");
}

std::string_view solution_kind_name(SolutionKind kind) {
  switch (kind) {
    case SolutionKind::closed_form: return "closed_form";
    case SolutionKind::quadrature_reference: return "quadrature_reference";
    case SolutionKind::fine_mesh_reference: return "fine_mesh_reference";
  }
  return "?";
}

SolutionFunction::SolutionFunction(std::function<double(double)> evaluator, double accuracy_estimate,
                                   SolutionKind kind, double end_time)
    : evaluator_(std::move(evaluator)), accuracy_(accuracy_estimate), kind_(kind), T_(end_time) {}

double SolutionFunction::operator()(double t) const {
  if (!(t >= 0.0 && t <= T_)) {
    std::ostringstream os;
    os << "t = " << t << " outside [0, " << T_ << "]";
    throw InvalidArgument(os.str());
  }
  return evaluator_(t);
}

IntegratingFactorQuadrature::IntegratingFactorQuadrature(ProblemSpec problem)
    : IntegratingFactorQuadrature(std::move(problem), Options{}) {}

IntegratingFactorQuadrature::IntegratingFactorQuadrature(ProblemSpec problem, Options options)
    : problem_(std::move(problem)),
      options_(options),
      rule_(&gauss_legendre(options.gauss_points)),
      scale_(std::abs(problem_.u0())) {
  const double T = problem_.end_time();
  for (std::size_t i = 0; i <= kCoefficientSamples; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(kCoefficientSamples);
    scale_ = std::max(scale_, std::abs(problem_.f()(t) / problem_.a()(t)));
  }
  scale_ = std::max(scale_, 1.0);
}

double IntegratingFactorQuadrature::decay(double t) const {
  return std::exp(-problem_.antiderivative(t) / problem_.eps());
}

double IntegratingFactorQuadrature::invert_antiderivative(double target, double lo, double hi,
                                                          double guess) const {
  const Coefficient& a = problem_.a();
  double s = std::clamp(guess, lo, hi);
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double residual = problem_.antiderivative(s) - target;
    if (residual > 0.0) hi = s;
    else lo = s;
    const double step = residual / a(s);
    if (std::abs(step) <= tol) return s - step;
    double next = s - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= tol) return next;
    s = next;
  }
  return s;
}

double IntegratingFactorQuadrature::panel_sum(double t, double tau_max, int level) const {
  const GaussLegendre& rule = *rule_;
  const double eps = problem_.eps();
  const double total = problem_.antiderivative(t);
  const Coefficient& a = problem_.a();
  const Coefficient& f = problem_.f();
  const double splits = std::ldexp(1.0, level);

  double sum = 0.0;
  double s_prev = t;
  double tau_prev = 0.0;
  for (std::size_t b = 0; b + 1 < kTauBreaks.size() && kTauBreaks[b] < tau_max; ++b) {
    const double lo = kTauBreaks[b];
    const double hi = std::min(kTauBreaks[b + 1], tau_max);
    const double width = (hi - lo) / splits;
    for (int k = 0; k < static_cast<int>(splits); ++k) {
      const double p_lo = lo + width * k;
      const double p_hi = (k + 1 == static_cast<int>(splits)) ? hi : p_lo + width;
      sum += rule.integrate(
          [&](double tau) {
            // Newton guess extrapolated from the previous node: ds/dtau = -eps / a(s).
            const double guess = s_prev - eps * (tau - tau_prev) / a(s_prev);
            const double s = invert_antiderivative(total - eps * tau, 0.0, t, guess);
            s_prev = s;
            tau_prev = tau;
            return std::exp(-tau) * f(s) / a(s);
          },
          p_lo, p_hi);
    }
  }
  return sum;
}

double IntegratingFactorQuadrature::converged_sum(double t, double tau_max) const {
  double previous = panel_sum(t, tau_max, 0);
  double diff = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= options_.max_refinements; ++level) {
    const double current = panel_sum(t, tau_max, level);
    diff = std::abs(current - previous);
    if (diff <= options_.relative_tolerance * std::abs(current) + options_.absolute_floor * scale_) {
      return current;
    }
    previous = current;
  }
  std::ostringstream os;
  os << "integrating-factor quadrature did not converge at t = " << t << " (eps = "
     << problem_.eps() << "): successive estimates differ by " << diff;
  throw QuadratureError(os.str(), diff);
}

double IntegratingFactorQuadrature::forced_response(double t) const {
  if (t <= 0.0) return 0.0;
  return converged_sum(t, std::min(problem_.antiderivative(t) / problem_.eps(), kTauCutoff));
}

std::vector<double> IntegratingFactorQuadrature::forced_response_at_nodes(
    std::span<const double> nodes) const {
  std::vector<double> out(nodes.size(), 0.0);
  if (nodes.empty()) return out;
  if (nodes.front() != 0.0) throw InvalidArgument("node grid must start at t = 0");
  const double eps = problem_.eps();
  double A_prev = 0.0;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    if (!(nodes[j] > nodes[j - 1])) throw InvalidArgument("node grid must be strictly increasing");
    const double A = problem_.antiderivative(nodes[j]);
    const double tau = (A - A_prev) / eps;
    out[j] = std::exp(-tau) * out[j - 1] + converged_sum(nodes[j], std::min(tau, kTauCutoff));
    A_prev = A;
  }
  return out;
}

double IntegratingFactorQuadrature::evaluate(double t, double initial) const {
  return decay(t) * initial + forced_response(t);
}

double IntegratingFactorQuadrature::accuracy_bound() const {
  return 10.0 * (options_.relative_tolerance + options_.absolute_floor) * scale_;
}

// Local relative errors are weighted by (1 - e^{-tau_j}) times the later
// decay factors, and those weights telescope to at most 1.
double IntegratingFactorQuadrature::nodal_accuracy_bound(std::size_t intervals) const {
  const double n = static_cast<double>(intervals);
  return 10.0 *
         (options_.relative_tolerance + n * (options_.absolute_floor + std::numeric_limits<double>::epsilon())) *
         scale_;
}

SolutionFunction reduced_solution(const ProblemSpec& p) {
  Coefficient a = p.a();
  Coefficient f = p.f();
  return SolutionFunction([a, f](double t) { return f(t) / a(t); }, 0.0, SolutionKind::closed_form,
                          p.end_time());
}

SolutionFunction exact_solution(const ProblemSpec& p) {
  if (p.constant_coefficients()) {
    const double a = p.a()(0.0);
    const double steady = p.f()(0.0) / a;
    const double amplitude = p.u0() - steady;
    const double rate = a / p.eps();
    return SolutionFunction(
        [steady, amplitude, rate](double t) { return steady + amplitude * std::exp(-rate * t); }, 0.0,
        SolutionKind::closed_form, p.end_time());
  }
  auto oracle = std::make_shared<IntegratingFactorQuadrature>(p);
  const double u0 = p.u0();
  return SolutionFunction([oracle, u0](double t) { return oracle->evaluate(t, u0); },
                          oracle->accuracy_bound(), SolutionKind::quadrature_reference,
                          p.end_time());
}

Decomposition continuous_decomposition(const ProblemSpec& p) {
  const double v0 = p.reduced_initial_value();
  const double w0 = p.u0() - v0;
  const double eps = p.eps();
  Coefficient a = p.a();
  SolutionFunction singular(
      [w0, eps, a](double t) { return w0 * std::exp(-a.integral(t) / eps); }, 0.0,
      SolutionKind::closed_form, p.end_time());
  return Decomposition{exact_solution(p.with_initial_value(v0)), std::move(singular), v0, w0};
}

StabilityReport continuous_stability_check(const ProblemSpec& p, std::size_t samples) {
  StabilityReport report;
  report.bound = std::max(std::abs(p.u0()), p.forcing_sup() / p.alpha());
  const SolutionFunction u = exact_solution(p);
  const std::vector<double> points = layer_sample_points(p.eps(), p.end_time(), samples);
  for (double t : points) report.max_abs_solution = std::max(report.max_abs_solution, std::abs(u(t)));
  report.samples = points.size();
  report.passed = report.max_abs_solution <= report.bound * (1.0 + 1e-8);
  return report;
}

std::vector<double> layer_sample_points(double eps, double T, std::size_t uniform_samples) {
  std::vector<double> points{0.0};
  for (int k = -4; k <= 8; ++k) {
    const double t = eps * std::ldexp(1.0, k);
    if (t < T) points.push_back(t);
  }
  const std::size_t n = std::max<std::size_t>(uniform_samples, 1);
  for (std::size_t i = 1; i <= n; ++i) {
    points.push_back(T * static_cast<double>(i) / static_cast<double>(n));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace spfit
