#include "spfit/coefficient.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "spfit/error.hpp"

namespace spfit {

namespace {

constexpr double kPi = std::numbers::pi;

// k-th derivative of sin(pi t) (cosine == false) or cos(pi t) (cosine == true).
double trig_derivative(bool cosine, double t, int order) {
  const double s = std::sin(kPi * t);
  const double c = std::cos(kPi * t);
  const double scale = std::pow(kPi, order);
  // d/dt sin = pi cos, d/dt cos = -pi sin; the cycle has period 4.
  const int phase = (order + (cosine ? 1 : 0)) % 4;
  switch (phase) {
    case 0: return scale * s;
    case 1: return scale * c;
    case 2: return -scale * s;
    default: return -scale * c;
  }
}

}  // namespace

std::string_view basis_name(Basis b) {
  switch (b) {
    case Basis::one: return "one";
    case Basis::t: return "t";
    case Basis::t2: return "t2";
    case Basis::sin_pi: return "sin_pi";
    case Basis::cos_pi: return "cos_pi";
    case Basis::exp: return "exp";
  }
  return "?";
}

Basis parse_basis(std::string_view name) {
  for (Basis b : {Basis::one, Basis::t, Basis::t2, Basis::sin_pi, Basis::cos_pi, Basis::exp}) {
    if (basis_name(b) == name) return b;
  }
  throw InvalidArgument("unknown basis function '" + std::string(name) + "'");
}

double basis_derivative(Basis b, double t, int order) {
  if (order < 0) throw InvalidArgument("derivative order must be nonnegative");
  switch (b) {
    case Basis::one:
      return order == 0 ? 1.0 : 0.0;
    case Basis::t:
      if (order == 0) return t;
      return order == 1 ? 1.0 : 0.0;
    case Basis::t2:
      if (order == 0) return t * t;
      if (order == 1) return 2.0 * t;
      return order == 2 ? 2.0 : 0.0;
    case Basis::sin_pi:
      return trig_derivative(false, t, order);
    case Basis::cos_pi:
      return trig_derivative(true, t, order);
    case Basis::exp:
      return std::exp(t);
  }
  return 0.0;
}

double basis_integral(Basis b, double t) {
  switch (b) {
    case Basis::one: return t;
    case Basis::t: return 0.5 * t * t;
    case Basis::t2: return t * t * t / 3.0;
    case Basis::sin_pi: {
      // (1 - cos(pi t)) / pi without cancellation near t = 0
      const double h = std::sin(0.5 * kPi * t);
      return 2.0 * h * h / kPi;
    }
    case Basis::cos_pi: return std::sin(kPi * t) / kPi;
    case Basis::exp: return std::expm1(t);
  }
  return 0.0;
}

Coefficient Coefficient::constant(double c) {
  return linear_combination({Term{c, Basis::one}});
}

Coefficient Coefficient::linear_combination(std::vector<Term> terms) {
  Coefficient out;
  for (const Term& term : terms) {
    if (!std::isfinite(term.weight)) {
      throw InvalidArgument("coefficient weights must be finite");
    }
    if (term.weight != 0.0) out.terms_.push_back(term);
  }
  return out;
}

double Coefficient::derivative(double t, int order) const {
  double sum = 0.0;
  for (const Term& term : terms_) sum += term.weight * basis_derivative(term.basis, t, order);
  return sum;
}

double Coefficient::integral(double t) const {
  double sum = 0.0;
  for (const Term& term : terms_) sum += term.weight * basis_integral(term.basis, t);
  return sum;
}

bool Coefficient::is_constant() const {
  for (const Term& term : terms_) {
    if (term.basis != Basis::one) return false;
  }
  return true;
}

std::string Coefficient::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0) os << " + ";
    os << terms_[i].weight << '*' << basis_name(terms_[i].basis);
  }
  return os.str();
}

}  // namespace spfit
