#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "spfit/coefficient.hpp"
#include "spfit/error.hpp"
#include "spfit/quadrature.hpp"

using namespace spfit;

namespace {

const Basis kAll[] = {Basis::one, Basis::t, Basis::t2, Basis::sin_pi, Basis::cos_pi, Basis::exp};

// Composite Simpson, written out here so the check does not share code with the library.
template <class F>
double simpson(F f, double lo, double hi, int panels = 2000) {
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("basis names round trip") {
  for (Basis b : kAll) CHECK(parse_basis(basis_name(b)) == b);
  CHECK_THROWS_AS(parse_basis("cosh"), InvalidArgument);
}

TEST_CASE("basis derivatives agree with central differences") {
  const double h = 1e-5;
  for (Basis b : kAll) {
    for (double t : {0.1, 0.37, 0.8}) {
      for (int order = 1; order <= 3; ++order) {
        const double fd = (basis_derivative(b, t + h, order - 1) - basis_derivative(b, t - h, order - 1)) / (2 * h);
        CHECK(basis_derivative(b, t, order) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
      }
    }
  }
}

TEST_CASE("basis integrals agree with Simpson") {
  for (Basis b : kAll) {
    for (double t : {0.0, 1e-9, 0.25, 1.0}) {
      const double ref = t == 0.0 ? 0.0 : simpson([b](double s) { return basis_derivative(b, s, 0); }, 0.0, t);
      CHECK(std::abs(basis_integral(b, t) - ref) <= 1e-12 * std::abs(ref) + 1e-16);
    }
  }
}

TEST_CASE("small-t integrals keep relative accuracy") {
  const double t = 1e-10;
  CHECK(basis_integral(Basis::sin_pi, t) == doctest::Approx(std::numbers::pi * t * t / 2).epsilon(1e-12));
  CHECK(basis_integral(Basis::exp, t) == doctest::Approx(t + t * t / 2).epsilon(1e-14));
}

TEST_CASE("coefficient combinations") {
  const Coefficient a = Coefficient::linear_combination({{2.0, Basis::one}, {1.0, Basis::sin_pi}, {0.0, Basis::t}});
  CHECK(a.terms().size() == 2);
  CHECK_FALSE(a.is_constant());
  CHECK(a(0.5) == doctest::Approx(3.0));
  CHECK(a.derivative(0.0) == doctest::Approx(std::numbers::pi));
  CHECK(a.integral(1.0) == doctest::Approx(2.0 + 2.0 / std::numbers::pi));
  CHECK(Coefficient::constant(4.0).is_constant());
  CHECK(Coefficient().is_constant());
  CHECK(Coefficient()(0.3) == 0.0);
  CHECK_THROWS_AS(Coefficient::linear_combination({{std::numeric_limits<double>::quiet_NaN(), Basis::t}}),
                  InvalidArgument);
  CHECK_FALSE(a.describe().empty());
}

TEST_CASE("Gauss-Legendre is exact for degree 2n-1") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (std::size_t n : {2u, 5u, 10u, 12u}) {
    const GaussLegendre& rule = gauss_legendre(n);
    CHECK(rule.size() == n);
    double wsum = 0.0;
    for (double w : rule.weights()) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    std::vector<double> c(2 * n);
    for (double& x : c) x = coef(rng);
    auto poly = [&](double x) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
      return s;
    };
    double exact = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) exact += c[k] * (std::pow(0.7, k + 1) - std::pow(-0.3, k + 1)) / (k + 1);
    CHECK(rule.integrate(poly, -0.3, 0.7) == doctest::Approx(exact).epsilon(1e-13));
  }
}
