#pragma once

#include <cstddef>
#include <vector>

namespace spfit {

/// Gauss-Legendre rule with n points on the reference interval [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(std::size_t n);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Applies the rule on [lo, hi].
  template <class F>
  double integrate(F&& f, double lo, double hi) const {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return half * sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared immutable rules for the orders used by the library.
const GaussLegendre& gauss_legendre(std::size_t n);

}  // namespace spfit
