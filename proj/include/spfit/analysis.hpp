#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spfit/mesh.hpp"
#include "spfit/problem.hpp"
#include "spfit/scheme.hpp"

namespace spfit {

/// {2^max_exp, 2^(max_exp-1), ..., 2^min_exp}, largest first.
std::vector<double> power_of_two_grid(int min_exp, int max_exp);

/// {n_min, 2 n_min, ...} up to and including n_max.
std::vector<std::size_t> doubling_grid(std::size_t n_min, std::size_t n_max);

/// Max-norm nodal errors E_eps^N over an (eps, N) grid for one problem,
/// mesh family and scheme.
struct ErrorTable {
  std::string problem;
  std::vector<double> eps_grid;
  std::vector<std::size_t> n_grid;
  /// errors[i][k] belongs to eps_grid[i] and n_grid[k].
  std::vector<std::vector<double>> errors;
  /// E^N = max over eps of errors[.][k].
  std::vector<double> uniform_errors;
  /// p^N = log2(E^N / E^{2N}) for k + 1 < n_grid.size(); empty where undefined.
  std::vector<std::optional<double>> orders;
  MeshSpec mesh;
  SchemeKind scheme = SchemeKind::fitted;
  std::uint64_t seed = 0;
};

/// max_j |U_j - u(t_j)|.
double nodal_error(const DiscreteSolution& U, const SolutionFunction& u);

/// As above, but first requires u.accuracy_estimate() <= 0.01 * expected_scale
/// and throws OracleTooCoarse otherwise.
double nodal_error(const DiscreteSolution& U, const SolutionFunction& u, double expected_scale);

struct OrderReport {
  /// One entry per consecutive pair of N; empty when E^{2N} = 0 or the pair is not a doubling.
  std::vector<std::optional<double>> orders;
  /// C_hat = max_N N * E^N.
  double c_hat = 0.0;
  /// Indices k whose order is undefined.
  std::vector<std::size_t> undefined;
};

OrderReport uniform_order(std::span<const std::size_t> n_grid, std::span<const double> uniform_errors);
OrderReport uniform_order(const ErrorTable& table);

/// Everything measured in one sweep over the (eps, N) grid.
struct ConvergenceStudy {
  ErrorTable total;
  /// |V - v| and |W - w| tables; present when components were requested.
  std::optional<ErrorTable> smooth;
  std::optional<ErrorTable> singular;
  /// max over cells of max_j |V_j + W_j - U_j| / max_j |U_j|.
  double max_split_residual = 0.0;
  std::size_t solves = 0;
  std::size_t stability_failures = 0;
};

/// Solves every (eps, N) cell and measures it against the exact solution.
/// Cells run concurrently; the result does not depend on scheduling.
/// Errors are rethrown with the failing (eps, N) in the message.
ConvergenceStudy run_convergence_study(const ProblemSpec& p, std::span<const double> eps_grid,
                                       std::span<const std::size_t> n_grid, const MeshSpec& mesh,
                                       SchemeKind scheme, std::uint64_t seed, bool components);

ErrorTable build_error_table(const ProblemSpec& p, std::span<const double> eps_grid,
                             std::span<const std::size_t> n_grid, const MeshSpec& mesh,
                             SchemeKind scheme, std::uint64_t seed);

/// Uniform first-order convergence criterion on a table: every p^N with
/// N >= n_from is at least min_order, and max_N N E^N / min_{N >= n_from} N E^N
/// stays within max_ratio.
struct UniformConvergenceCheck {
  double min_order_seen = 0.0;
  double constant_ratio = 0.0;
  bool orders_ok = false;
  bool ratio_ok = false;
  bool passed() const { return orders_ok && ratio_ok; }
};

UniformConvergenceCheck check_uniform_convergence(const ErrorTable& table, double min_order = 0.85,
                                                  std::size_t n_from = 64, double max_ratio = 4.0);

/// C(eps) = max_N N * errors[eps][N] for every row of the table.
std::vector<double> constants_per_eps(const ErrorTable& table);

/// max over eps <= reference_eps of C(eps), divided by C(reference_eps).
/// 1 when everything is zero, infinity when only the reference is zero.
double stability_ratio(std::span<const double> eps_grid, std::span<const double> constants,
                       double reference_eps);

struct BoundSample {
  double parameter;  ///< eps for layer bounds, t_j for the interval sandwich
  double value;      ///< inferred constant or relative margin
};

struct BoundReport {
  std::string name;
  std::vector<BoundSample> samples;
  double inferred_constant = 0.0;
  double ratio = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  bool passed = false;
  std::string note;
};

/// Inferred constants of the smooth/singular component bounds
///
///     |w^(k)(t)| <= C eps^-k e^{-alpha t / eps},   k = 0..k_max
///     |v|_k <= C (k = 0, 1),   |v|_2 <= C / eps
///
/// over eps_grid. Each bound passes when the constant at the smallest eps
/// values stays within a factor 10 of the one at eps_grid.front().
std::vector<BoundReport> check_layer_bounds(const ProblemSpec& p, int k_max = 2,
                                            std::span<const double> eps_grid = {});

/// For every mesh interval, w_j / w_{j-1} must lie in
/// [e^{-rho_j max a}, e^{-rho_j min a}] with min/max of a sampled on the
/// interval. The note records how the reversed orientation fares.
BoundReport check_sandwich(const ProblemSpec& p, const Mesh& m);

}  // namespace spfit
