#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spfit/mesh.hpp"
#include "spfit/problem.hpp"

namespace spfit {

/// Second reference solution, independent of the integrating-factor quadrature.
///
/// Marches the exact one-step relation
///
///     u(t_j) = e^{-B_j(h_j)/eps} u(t_{j-1}) + (1/eps) int_0^{h_j} e^{-B_j(x)/eps} f(t_j - x) dx,
///     B_j(x) = int_{t_j - x}^{t_j} a,
///
/// over a fine layer-adapted mesh. B_j comes from a local Taylor expansion of
/// a about t_j (no closed-form antiderivative is used) and the source
/// integral from Gauss-Legendre panels graded on the layer scale eps / a(t_j).
/// With a and f frozen at t_j the step reduces to the fitted recurrence.
class FineMeshReference {
 public:
  FineMeshReference(ProblemSpec problem, Mesh mesh);

  /// Value at any t in [0, T]: the nodal value to the left, advanced by a partial step.
  double operator()(double t) const;

  const Mesh& mesh() const { return mesh_; }
  std::span<const double> nodal_values() const { return values_; }
  double accuracy_bound() const { return accuracy_; }

 private:
  double step(double t_left, double t_right, double value_left) const;

  ProblemSpec problem_;
  Mesh mesh_;
  std::vector<double> values_;
  double accuracy_;
};

/// Piecewise-uniform mesh with a quarter of the intervals inside
/// [0, min(T/2, 40 eps / alpha)] and the rest on the remainder.
Mesh layer_adapted_mesh(double eps, double alpha, double T, std::size_t intervals);

inline constexpr std::size_t kFineIntervals = std::size_t{1} << 16;

SolutionFunction fine_mesh_reference(const ProblemSpec& p, std::size_t intervals = kFineIntervals);

struct OracleAgreement {
  std::string problem;
  double eps = 0.0;
  double max_difference = 0.0;
  double worst_t = 0.0;
  std::size_t samples = 0;
  double tolerance = 0.0;
  bool passed() const { return max_difference <= tolerance; }
};

/// Maximum difference between the quadrature oracle and the fine-mesh
/// reference over layer-resolving sample points.
OracleAgreement compare_oracles(const ProblemSpec& p, double tolerance = 1e-8,
                                std::size_t intervals = kFineIntervals);

/// exact_solution(p) after it has been cross-checked against the fine-mesh
/// reference; throws OracleError if the two disagree beyond tolerance.
SolutionFunction validated_reference(const ProblemSpec& p, double tolerance = 1e-8);

}  // namespace spfit
