#include "spfit/reference.hpp"

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

// Source-integral panels in units of the local layer scale eps / a(t_j).
constexpr std::array<double, 8> kLayerBreaks = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 48.0};
constexpr std::size_t kGaussPoints = 12;
constexpr int kTaylorTerms = 5;
// Taylor remainder of B_j is a^(5) h^6 / 720; this keeps it far below 1e-14 eps.
constexpr double kMaxWidth = 1e-3;

}  // namespace

FineMeshReference::FineMeshReference(ProblemSpec problem, Mesh mesh)
    : problem_(std::move(problem)), mesh_(std::move(mesh)) {
  const MeshValidation report = validate(mesh_);
  if (!report.ok()) throw InvalidMesh(report.summary());
  if (std::abs(mesh_.end_time() - problem_.end_time()) > 1e-12 * problem_.end_time()) {
    throw InvalidMesh("reference mesh and problem end times differ");
  }
  if (mesh_.max_width() > kMaxWidth) throw InvalidArgument("fine-mesh reference needs widths <= 1e-3");

  const std::size_t N = mesh_.intervals();
  values_.resize(N + 1);
  values_[0] = problem_.u0();
  for (std::size_t j = 1; j <= N; ++j) values_[j] = step(mesh_.node(j - 1), mesh_.node(j), values_[j - 1]);

  double scale = std::max(1.0, std::abs(problem_.u0()));
  for (std::size_t j = 0; j <= N; j += std::max<std::size_t>(1, N / 1024)) {
    const double t = mesh_.node(j);
    scale = std::max(scale, std::abs(problem_.f()(t) / problem_.a()(t)));
  }
  accuracy_ = 2.0 * static_cast<double>(N) * std::numeric_limits<double>::epsilon() * scale;
}

double FineMeshReference::step(double t_left, double t_right, double value_left) const {
  const double h = t_right - t_left;
  if (h <= 0.0) return value_left;
  const double eps = problem_.eps();
  const Coefficient& f = problem_.f();

  // B(x) = sum_k (-1)^k a^(k)(t_right) x^(k+1) / (k+1)!
  std::array<double, kTaylorTerms> taylor{};
  double factorial = 1.0;
  for (int k = 0; k < kTaylorTerms; ++k) {
    factorial *= static_cast<double>(k + 1);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    taylor[k] = sign * problem_.a().derivative(t_right, k) / factorial;
  }
  auto integrated_rate = [&](double x) {
    double sum = 0.0;
    for (int k = kTaylorTerms - 1; k >= 0; --k) sum = (sum + taylor[k]) * x;
    return sum;
  };

  const GaussLegendre& rule = gauss_legendre(kGaussPoints);
  const double layer = eps / taylor[0];
  double source = 0.0;
  for (std::size_t b = 0; b + 1 < kLayerBreaks.size(); ++b) {
    const double lo = kLayerBreaks[b] * layer;
    if (lo >= h) break;
    const double hi = std::min(kLayerBreaks[b + 1] * layer, h);
    source += rule.integrate(
        [&](double x) { return std::exp(-integrated_rate(x) / eps) * f(t_right - x); }, lo, hi);
  }
  return std::exp(-integrated_rate(h) / eps) * value_left + source / eps;
}

double FineMeshReference::operator()(double t) const {
  const auto nodes = mesh_.nodes();
  if (!(t >= 0.0 && t <= nodes.back())) throw InvalidArgument("fine-mesh reference: t outside [0, T]");
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  const std::size_t left = static_cast<std::size_t>(std::distance(nodes.begin(), it)) - 1;
  if (nodes[left] == t) return values_[left];
  return step(nodes[left], t, values_[left]);
}

Mesh layer_adapted_mesh(double eps, double alpha, double T, std::size_t intervals) {
  if (intervals < 4) throw InvalidArgument("layer-adapted mesh needs at least 4 intervals");
  const double transition = std::min(0.5 * T, 40.0 * eps / alpha);
  const std::size_t inner = intervals / 4;
  const std::size_t outer = intervals - inner;
  std::vector<double> nodes(intervals + 1);
  for (std::size_t j = 0; j <= inner; ++j) {
    nodes[j] = transition * static_cast<double>(j) / static_cast<double>(inner);
  }
  for (std::size_t j = 1; j <= outer; ++j) {
    nodes[inner + j] = transition + (T - transition) * static_cast<double>(j) / static_cast<double>(outer);
  }
  nodes.back() = T;
  double widest = 0.0;
  for (std::size_t j = 1; j <= intervals; ++j) widest = std::max(widest, nodes[j] - nodes[j - 1]);
  return Mesh(std::move(nodes), MeshKind::custom, widest * static_cast<double>(intervals) / T);
}

SolutionFunction fine_mesh_reference(const ProblemSpec& p, std::size_t intervals) {
  auto reference = std::make_shared<FineMeshReference>(
      p, layer_adapted_mesh(p.eps(), p.alpha(), p.end_time(), intervals));
  const double accuracy = reference->accuracy_bound();
  return SolutionFunction([reference](double t) { return (*reference)(t); }, accuracy,
                          SolutionKind::fine_mesh_reference, p.end_time());
}

OracleAgreement compare_oracles(const ProblemSpec& p, double tolerance, std::size_t intervals) {
  const IntegratingFactorQuadrature quadrature(p);
  const FineMeshReference fine(p, layer_adapted_mesh(p.eps(), p.alpha(), p.end_time(), intervals));
  OracleAgreement result;
  result.problem = p.name();
  result.eps = p.eps();
  result.tolerance = tolerance;
  for (double t : layer_sample_points(p.eps(), p.end_time(), 1024)) {
    const double diff = std::abs(quadrature.evaluate(t, p.u0()) - fine(t));
    if (diff > result.max_difference) {
      result.max_difference = diff;
      result.worst_t = t;
    }
    ++result.samples;
  }
  return result;
}

SolutionFunction validated_reference(const ProblemSpec& p, double tolerance) {
  const OracleAgreement agreement = compare_oracles(p, tolerance);
  if (!agreement.passed()) {
    std::ostringstream os;
    os << "reference rejected for problem '" << p.name() << "' at eps = " << p.eps()
       << ": quadrature and fine-mesh oracles differ by " << agreement.max_difference << " at t = "
       << agreement.worst_t << " (tolerance " << tolerance << ")";
    throw OracleError(os.str());
  }
  return exact_solution(p);
}

}  // namespace spfit
