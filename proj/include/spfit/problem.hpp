#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spfit/coefficient.hpp"

namespace spfit {

class GaussLegendre;

/// One instance of the initial value problem
///
///     eps u'(t) + a(t) u(t) = f(t),  0 < t <= T,   u(0) = u0,
///
/// with a(t) >= alpha > 0 and 0 < eps <= 1. The antiderivative
/// A(t) = int_0^t a(s) ds is always available in closed form.
class ProblemSpec {
 public:
  /// Throws InvalidProblem when eps, T, alpha or the lower bound on a is violated.
  ProblemSpec(std::string name, Coefficient a, Coefficient f, double u0, double eps, double T,
              double alpha);

  const std::string& name() const { return name_; }
  const Coefficient& a() const { return a_; }
  const Coefficient& f() const { return f_; }
  double u0() const { return u0_; }
  double eps() const { return eps_; }
  double end_time() const { return T_; }
  double alpha() const { return alpha_; }

  /// A(t) = int_0^t a.
  double antiderivative(double t) const { return a_.integral(t); }

  /// f(0) / a(0), the initial value of the smooth component.
  double reduced_initial_value() const { return f_(0.0) / a_(0.0); }

  /// Both coefficients constant: the exact solution is an elementary closed form.
  bool constant_coefficients() const { return a_.is_constant() && f_.is_constant(); }

  ProblemSpec with_eps(double eps) const;
  ProblemSpec with_initial_value(double u0) const;

  /// Dense sample of max |f| on [0, T]; used by the stability bounds.
  double forcing_sup(std::size_t samples = 1024) const;

 private:
  std::string name_;
  Coefficient a_;
  Coefficient f_;
  double u0_;
  double eps_;
  double T_;
  double alpha_;
};

/// Names of the bundled problems, in catalog order.
std::vector<std::string> catalog_names();

/// Bundled problem by name, on [0, 1], with the given eps.
/// Throws InvalidArgument naming the key if it is unknown.
ProblemSpec catalog_problem(std::string_view name, double eps = 1.0);

enum class SolutionKind { closed_form, quadrature_reference, fine_mesh_reference };

std::string_view solution_kind_name(SolutionKind kind);

/// A function on [0, T] with an absolute accuracy bound.
class SolutionFunction {
 public:
  SolutionFunction(std::function<double(double)> evaluator, double accuracy_estimate,
                   SolutionKind kind, double end_time);

  /// Throws InvalidArgument outside [0, T].
  double operator()(double t) const;

  double accuracy_estimate() const { return accuracy_; }
  SolutionKind kind() const { return kind_; }
  double end_time() const { return T_; }

 private:
  std::function<double(double)> evaluator_;
  double accuracy_;
  SolutionKind kind_;
  double T_;
};

/// Integrating-factor representation of the solution,
///
///     u(t) = e^{-A(t)/eps} u0 + (1/eps) int_0^t e^{-(A(t)-A(s))/eps} f(s) ds.
///
/// The integral is evaluated after substituting tau = (A(t) - A(s)) / eps,
/// which turns it into int_0^{A(t)/eps} e^{-tau} (f/a)(s(tau)) dtau. The
/// kernel no longer depends on eps, so composite Gauss-Legendre panels
/// graded toward tau = 0 resolve it for any eps. s(tau) is recovered by a
/// safeguarded Newton solve of A(s) = A(t) - eps tau.
class IntegratingFactorQuadrature {
 public:
  struct Options {
    double relative_tolerance = 1e-12;
    double absolute_floor = 1e-15;
    std::size_t gauss_points = 10;
    int max_refinements = 8;
  };

  explicit IntegratingFactorQuadrature(ProblemSpec problem);
  IntegratingFactorQuadrature(ProblemSpec problem, Options options);

  /// e^{-A(t)/eps}.
  double decay(double t) const;

  /// The forced part (1/eps) int_0^t e^{-(A(t)-A(s))/eps} f(s) ds.
  /// Throws QuadratureError if refinement does not converge.
  double forced_response(double t) const;

  /// decay(t) * initial + forced_response(t).
  double evaluate(double t, double initial) const;

  /// forced_response at every node of an increasing grid starting at 0,
  /// marched interval by interval through the semigroup relation
  ///     F(t_j) = e^{-(A(t_j)-A(t_{j-1}))/eps} F(t_{j-1}) + local_j.
  /// Each local integral needs only the tau range of its own interval.
  std::vector<double> forced_response_at_nodes(std::span<const double> nodes) const;

  /// Absolute accuracy guaranteed for values the evaluator returns.
  double accuracy_bound() const;

  /// Accuracy of forced_response_at_nodes on a grid with the given number of intervals.
  double nodal_accuracy_bound(std::size_t intervals) const;

  const ProblemSpec& problem() const { return problem_; }

 private:
  double panel_sum(double t, double tau_max, int level) const;
  double converged_sum(double t, double tau_max) const;
  double invert_antiderivative(double target, double lo, double hi, double guess) const;

  ProblemSpec problem_;
  Options options_;
  const GaussLegendre* rule_;
  double scale_;
};

/// u_0(t) = f(t) / a(t).
SolutionFunction reduced_solution(const ProblemSpec& p);

/// Exact solution: closed form for constant a and f, otherwise the
/// integrating-factor quadrature.
SolutionFunction exact_solution(const ProblemSpec& p);

/// Continuous splitting u = v + w into smooth and singular components.
struct Decomposition {
  SolutionFunction smooth;    ///< v: eps v' + a v = f, v(0) = f(0)/a(0)
  SolutionFunction singular;  ///< w: eps w' + a w = 0, w(0) = u0 - f(0)/a(0)
  double smooth_initial;
  double singular_initial;
};

Decomposition continuous_decomposition(const ProblemSpec& p);

/// |u(t)| <= max{|u(0)|, |f|_inf / alpha} sampled on [0, T].
struct StabilityReport {
  double max_abs_solution = 0.0;
  double bound = 0.0;
  std::size_t samples = 0;
  bool passed = false;
};

StabilityReport continuous_stability_check(const ProblemSpec& p, std::size_t samples);

/// Sample points on [0, T] that resolve an initial layer of width O(eps):
/// a geometric cluster near t = 0 followed by a uniform sweep.
std::vector<double> layer_sample_points(double eps, double T, std::size_t uniform_samples);

}  // namespace spfit
