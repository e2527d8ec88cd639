#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spfit {

/// Closed-form functions a coefficient can be assembled from.
enum class Basis { one, t, t2, sin_pi, cos_pi, exp };

std::string_view basis_name(Basis b);

/// Inverse of basis_name. Throws InvalidArgument for unknown names.
Basis parse_basis(std::string_view name);

/// `order`-th derivative of a basis function at t; order 0 is the value.
double basis_derivative(Basis b, double t, int order);

/// Integral of a basis function over [0, t].
double basis_integral(Basis b, double t);

struct Term {
  double weight;
  Basis basis;
};

/// Coefficient function of the form sum_i w_i * b_i(t).
///
/// Restricting coefficients to combinations of catalog functions keeps every
/// derivative and the antiderivative A(t) = int_0^t a available in closed
/// form, which the reference solvers rely on.
class Coefficient {
 public:
  /// The zero function.
  Coefficient() = default;

  static Coefficient constant(double c);
  static Coefficient linear_combination(std::vector<Term> terms);

  double operator()(double t) const { return derivative(t, 0); }
  double derivative(double t, int order = 1) const;

  /// int_0^t of the coefficient; vanishes at t = 0.
  double integral(double t) const;

  /// True when every non-zero term is the constant basis function.
  bool is_constant() const;

  const std::vector<Term>& terms() const { return terms_; }

  /// Human readable form such as "2*one + 1*sin_pi".
  std::string describe() const;

 private:
  std::vector<Term> terms_;
};

}  // namespace spfit
