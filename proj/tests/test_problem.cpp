#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "spfit/error.hpp"
#include "spfit/problem.hpp"

using namespace spfit;

namespace {

using C = Coefficient;

ProblemSpec decay_problem(double eps) {
  return ProblemSpec("a_1pt", C::linear_combination({{1.0, Basis::one}, {1.0, Basis::t}}), C(), 1.0, eps, 1.0, 1.0);
}

// a = 1, f = t: u = t - eps + (u0 + eps) e^{-t/eps}. f is not constant, so
// exact_solution goes through the quadrature.
ProblemSpec ramp_problem(double eps, double u0) {
  return ProblemSpec("ramp", C::constant(1.0), C::linear_combination({{1.0, Basis::t}}), u0, eps, 1.0, 1.0);
}

double ramp_exact(double t, double eps, double u0) { return t - eps + (u0 + eps) * std::exp(-t / eps); }

}  // namespace

TEST_CASE("catalog") {
  CHECK(catalog_names().size() == 5);
  for (const std::string& name : catalog_names()) {
    const ProblemSpec p = catalog_problem(name, 0.5);
    CHECK(p.name() == name);
    CHECK(p.eps() == 0.5);
    CHECK(p.end_time() == 1.0);
  }
  try {
    catalog_problem("no_such_problem");
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("no_such_problem") != std::string::npos);
  }
  CHECK(catalog_problem("steady").constant_coefficients());
  CHECK_FALSE(catalog_problem("var_sine").constant_coefficients());
  CHECK(catalog_problem("var_linear").reduced_initial_value() == 1.0);
}

TEST_CASE("problem validation") {
  const C one = C::constant(1.0);
  CHECK_THROWS_AS(ProblemSpec("p", one, one, 0.0, 0.0, 1.0, 1.0), InvalidProblem);
  CHECK_THROWS_AS(ProblemSpec("p", one, one, 0.0, 1.5, 1.0, 1.0), InvalidProblem);
  CHECK_THROWS_AS(ProblemSpec("p", one, one, 0.0, 0.5, -1.0, 1.0), InvalidProblem);
  CHECK_THROWS_AS(ProblemSpec("p", one, one, 0.0, 0.5, 1.0, 0.0), InvalidProblem);
  CHECK_THROWS_AS(ProblemSpec("p", one, one, 0.0, 0.5, 1.0, 2.0), InvalidProblem);
  const C dips = C::linear_combination({{1.0, Basis::one}, {-1.0, Basis::sin_pi}});
  CHECK_THROWS_AS(ProblemSpec("p", dips, one, 0.0, 0.5, 1.0, 0.5), InvalidProblem);
  CHECK_NOTHROW(ProblemSpec("p", one, one, 0.0, 1.0, 1.0, 1.0));
}

TEST_CASE("closed form for constant coefficients") {
  const ProblemSpec p = catalog_problem("const_a1_f1_u3", 0.01);
  const SolutionFunction u = exact_solution(p);
  CHECK(u.kind() == SolutionKind::closed_form);
  CHECK(u.accuracy_estimate() == 0.0);
  for (double t : {0.0, 0.005, 0.05, 1.0}) CHECK(u(t) == doctest::Approx(1.0 + 2.0 * std::exp(-t / 0.01)).epsilon(1e-15));
  CHECK_THROWS_AS(u(1.5), InvalidArgument);
  CHECK_THROWS_AS(u(-0.1), InvalidArgument);
}

TEST_CASE("quadrature reproduces e^{-A/eps} for a = 1 + t") {
  const ProblemSpec p = decay_problem(0.01);
  const SolutionFunction u = exact_solution(p);
  CHECK(u.kind() == SolutionKind::quadrature_reference);
  // A(0.2) = 0.2 + 0.02
  CHECK(u(0.2) == doctest::Approx(std::exp(-22.0)).epsilon(1e-12));
  CHECK(u(1.0) == doctest::Approx(std::exp(-150.0)).epsilon(1e-12));
}

TEST_CASE("quadrature matches a nonconstant-forcing closed form for every eps") {
  for (int k = 0; k <= 20; k += 2) {
    const double eps = std::ldexp(1.0, -k);
    const double u0 = 0.75;
    const SolutionFunction u = exact_solution(ramp_problem(eps, u0));
    for (double t : layer_sample_points(eps, 1.0, 64)) {
      CAPTURE(eps);
      CAPTURE(t);
      CHECK(std::abs(u(t) - ramp_exact(t, eps, u0)) <= 1e-12);
    }
  }
}

TEST_CASE("marched nodal values agree with pointwise evaluation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const char* name : {"var_linear", "var_sine"}) {
    for (int k : {0, 5, 12, 20}) {
      const IntegratingFactorQuadrature q(catalog_problem(name, std::ldexp(1.0, -k)));
      std::vector<double> nodes{0.0};
      for (int i = 0; i < 60; ++i) nodes.push_back(nodes.back() + 0.2 + unit(rng));
      for (double& t : nodes) t /= nodes.back();
      const std::vector<double> marched = q.forced_response_at_nodes(nodes);
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        CHECK(std::abs(marched[j] - q.forced_response(nodes[j])) <= q.nodal_accuracy_bound(nodes.size()));
      }
    }
  }
  const IntegratingFactorQuadrature q(catalog_problem("var_sine"));
  const std::vector<double> bad{0.0, 0.5, 0.4};
  CHECK_THROWS_AS(q.forced_response_at_nodes(bad), InvalidArgument);
}

TEST_CASE("quadrature reports non-convergence") {
  IntegratingFactorQuadrature::Options opts;
  opts.max_refinements = 0;
  const IntegratingFactorQuadrature q(catalog_problem("var_sine", 0.1), opts);
  CHECK_THROWS_AS(q.forced_response(0.5), QuadratureError);
  CHECK(q.forced_response(0.0) == 0.0);
}

TEST_CASE("exact solutions satisfy the ODE") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  for (const std::string& name : catalog_names()) {
    for (int k : {0, 4, 10}) {
      const double eps = std::ldexp(1.0, -k);
      const ProblemSpec p = catalog_problem(name, eps);
      const SolutionFunction u = exact_solution(p);
      for (int i = 0; i < 20; ++i) {
        const double t = unit(rng);
        const double h = 1e-4 * std::min(eps, t);
        const double du = (u(t + h) - u(t - h)) / (2 * h);
        CAPTURE(name);
        CAPTURE(t);
        CHECK(std::abs(eps * du + p.a()(t) * u(t) - p.f()(t)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("continuous decomposition sums to the solution") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const std::string& name : catalog_names()) {
    for (int k : {1, 8, 16}) {
      const ProblemSpec p = catalog_problem(name, std::ldexp(1.0, -k));
      const Decomposition d = continuous_decomposition(p);
      const SolutionFunction u = exact_solution(p);
      CHECK(d.smooth_initial + d.singular_initial == doctest::Approx(p.u0()));
      CHECK(d.smooth(0.0) == doctest::Approx(p.reduced_initial_value()));
      const double tol = d.smooth.accuracy_estimate() + u.accuracy_estimate() + 1e-15;
      for (int i = 0; i < 100; ++i) {
        const double t = std::pow(unit(rng), 4.0);
        CHECK(std::abs(d.smooth(t) + d.singular(t) - u(t)) <= tol);
      }
    }
  }
}

TEST_CASE("continuous stability bound") {
  for (const std::string& name : catalog_names()) {
    for (int k : {0, 6, 20}) {
      const StabilityReport r = continuous_stability_check(catalog_problem(name, std::ldexp(1.0, -k)), 256);
      CAPTURE(name);
      CHECK(r.passed);
      CHECK(r.samples > 256);
    }
  }
}

TEST_CASE("layer sample points") {
  const std::vector<double> pts = layer_sample_points(1e-3, 1.0, 10);
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == 1.0);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  CHECK(std::find(pts.begin(), pts.end(), 1e-3) != pts.end());
}

TEST_CASE("reduced solution") {
  const SolutionFunction u0 = reduced_solution(catalog_problem("var_linear"));
  CHECK(u0(1.0) == doctest::Approx(1.0));
  CHECK(u0(0.5) == doctest::Approx(1.25 / 1.5));
}
