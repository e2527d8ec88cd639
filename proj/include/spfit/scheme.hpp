#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "spfit/mesh.hpp"
#include "spfit/problem.hpp"

namespace spfit {

/// fitted: eps sigma_j D^- U + a_j U = f_j with sigma_j = x / (e^x - 1), x = a_j h_j / eps.
/// standard: plain backward Euler, sigma_j = 1.
enum class SchemeKind { fitted, standard };

std::string_view scheme_name(SchemeKind kind);
SchemeKind parse_scheme(std::string_view name);

/// e^{-x} for x >= 0, clamped below at the smallest positive subnormal.
///
/// In exact arithmetic e^{-x} > 0 for every finite x; the clamp keeps that
/// true in floating point where e^{-x} would otherwise underflow to zero.
double positive_decay(double x);

/// sigma(a_j, rho_j) = x / (e^x - 1) with x = a_j * rho_j, and sigma(a, 0) = 1.
///
/// x < 1e-2 goes through expm1, x >= 30 uses x e^{-x} / (1 - e^{-x}); the
/// result lies in (0, 1] for every admissible input. Throws DomainError for
/// a_j <= 0 or rho_j < 0.
double fitting_factor(double a_j, double rho_j);

/// |e^{-p} - e^{-q}| evaluated as e^{-min} (1 - e^{-|p-q|}) without cancellation.
double exp_difference(double p, double q);

/// The comparison bound |p - q| e^{-min(p, q)} on exp_difference(p, q).
double exp_difference_bound(double p, double q);

/// One step of either scheme written as U_j = carry * U_{j-1} + source * g_j.
///
/// For the fitted scheme carry = e^{-a_j rho_j} and source = (1 - carry) / a_j,
/// the overflow-free form of (eps sigma_j / h_j U_{j-1} + g_j) / (eps sigma_j / h_j + a_j).
/// For the standard scheme carry = 1 / (1 + a_j rho_j), source = rho_j / (1 + a_j rho_j).
/// Both coefficients are strictly positive.
struct StepCoefficients {
  double carry;
  double source;
};

StepCoefficients step_coefficients(SchemeKind scheme, double a_j, double h_j, double eps);

class DiscreteSolution {
 public:
  DiscreteSolution(Mesh mesh, std::vector<double> values, SchemeKind scheme, ProblemSpec problem);

  const Mesh& mesh() const { return mesh_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  SchemeKind scheme() const { return scheme_; }
  const ProblemSpec& problem() const { return problem_; }
  double max_abs() const;

 private:
  Mesh mesh_;
  std::vector<double> values_;
  SchemeKind scheme_;
  ProblemSpec problem_;
};

/// Solves L^N_sigma U = g with U_0 = initial, where rhs holds g_1..g_N.
/// a_j = a(t_j) and g_j are taken at the right end of each interval.
std::vector<double> march(const ProblemSpec& p, const Mesh& m, SchemeKind s,
                          std::span<const double> rhs, double initial);

/// L^N_sigma applied to a mesh function: entries j = 1..N of
/// eps sigma_j (Psi_j - Psi_{j-1}) / h_j + a_j Psi_j.
std::vector<double> apply_operator(const ProblemSpec& p, const Mesh& m, SchemeKind s,
                                   std::span<const double> psi);

/// f(t_j) for j = 1..N.
std::vector<double> forcing_at_nodes(const ProblemSpec& p, const Mesh& m);

/// Validates the mesh against the problem (throws InvalidMesh) and solves
/// with U_0 = u0.
DiscreteSolution solve(const ProblemSpec& p, const Mesh& m, SchemeKind s);

/// U = V + W: V solves the scheme from f(0)/a(0), W the homogeneous scheme
/// from u0 - f(0)/a(0).
struct DiscreteDecomposition {
  DiscreteSolution smooth;
  DiscreteSolution singular;
};

DiscreteDecomposition discrete_decompose(const ProblemSpec& p, const Mesh& m, SchemeKind s);

/// Random trials of the discrete maximum principle: Psi_0 >= 0 and g >= 0 must give Psi >= 0.
struct MaxPrincipleReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// min over trials and nodes of Psi_j / max(1, |Psi|_inf); nonnegative when all pass.
  double worst_margin = 0.0;
  bool skipped() const { return trials == 0; }
  bool passed() const { return trials > 0 && violations == 0; }
};

MaxPrincipleReport check_discrete_max_principle(const ProblemSpec& p, const Mesh& m, SchemeKind s,
                                                std::size_t trials, std::uint64_t seed);

/// max_j |U_j| <= max{|u0|, max_j |f_j| / alpha}.
struct DiscreteStabilityReport {
  double max_abs_solution = 0.0;
  double bound = 0.0;
  bool passed = false;
};

DiscreteStabilityReport check_discrete_stability(const DiscreteSolution& U);

/// Random sweep of 0 < sigma < 1 and 1 - sigma <= min{1, a rho / 2}.
struct FittingFactorSweep {
  std::size_t samples = 0;
  std::size_t range_violations = 0;
  std::size_t bound_violations = 0;
  double min_sigma = 1.0;
  double max_sigma = 0.0;
  bool passed() const { return samples > 0 && range_violations == 0 && bound_violations == 0; }
};

/// a is drawn from [0.5, 4], rho log-uniformly from [1e-6, 1e6].
FittingFactorSweep sweep_fitting_factor(std::size_t samples, std::uint64_t seed);

}  // namespace spfit
