#include "spfit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include "spfit/error.hpp"

namespace spfit {

namespace {

// Relative slack on the width bound for rounding in the rescaling step.
constexpr double kWidthSlack = 1e-12;

// Uniform double in [0, 1) from the top 53 bits; unlike
// std::uniform_real_distribution this is identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_size_and_length(std::size_t N, double T) {
  if (N == 0) throw InvalidArgument("mesh needs at least one interval");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("mesh length T must be positive");
}

// Nodes from relative widths, rescaled to [0, T]; the last node is pinned to T.
std::vector<double> nodes_from_widths(const std::vector<double>& widths, double T) {
  double total = 0.0;
  for (double w : widths) total += w;
  std::vector<double> nodes(widths.size() + 1, 0.0);
  double partial = 0.0;
  for (std::size_t j = 0; j < widths.size(); ++j) {
    partial += widths[j];
    nodes[j + 1] = T * (partial / total);
  }
  nodes.back() = T;
  return nodes;
}

}  // namespace

std::string_view mesh_kind_name(MeshKind kind) {
  switch (kind) {
    case MeshKind::uniform: return "uniform";
    case MeshKind::random_quasi_uniform: return "random";
    case MeshKind::graded: return "graded";
    case MeshKind::custom: return "custom";
  }
  return "?";
}

MeshKind parse_mesh_kind(std::string_view name) {
  if (name == "uniform") return MeshKind::uniform;
  if (name == "random") return MeshKind::random_quasi_uniform;
  if (name == "graded") return MeshKind::graded;
  if (name == "custom") return MeshKind::custom;
  throw InvalidArgument("unknown mesh kind '" + std::string(name) + "'");
}

Mesh::Mesh(std::vector<double> nodes, MeshKind kind, double c_mesh, std::optional<std::uint64_t> seed)
    : nodes_(std::move(nodes)), kind_(kind), c_mesh_(c_mesh), seed_(seed) {}

double Mesh::max_width() const {
  double h = 0.0;
  for (std::size_t j = 1; j < nodes_.size(); ++j) h = std::max(h, width(j));
  return h;
}

double Mesh::min_width() const {
  double h = end_time();
  for (std::size_t j = 1; j < nodes_.size(); ++j) h = std::min(h, width(j));
  return h;
}

Mesh uniform_mesh(std::size_t N, double T) {
  check_size_and_length(N, T);
  std::vector<double> nodes(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    nodes[j] = T * static_cast<double>(j) / static_cast<double>(N);
  }
  nodes.back() = T;
  return Mesh(std::move(nodes), MeshKind::uniform, 1.0);
}

Mesh random_quasi_uniform_mesh(std::size_t N, double T, std::uint64_t seed, double spread) {
  check_size_and_length(N, T);
  if (!(spread >= 0.0 && spread < 1.0)) throw InvalidArgument("spread must lie in [0, 1)");
  if (spread == 0.0) {
    Mesh m = uniform_mesh(N, T);
    return Mesh({m.nodes().begin(), m.nodes().end()}, MeshKind::random_quasi_uniform, 1.0, seed);
  }
  std::mt19937_64 rng(seed);
  std::vector<double> widths(N);
  for (double& w : widths) w = 1.0 - spread + 2.0 * spread * unit_uniform(rng);
  return Mesh(nodes_from_widths(widths, T), MeshKind::random_quasi_uniform,
              (1.0 + spread) / (1.0 - spread), seed);
}

Mesh graded_mesh(std::size_t N, double T, double grading) {
  check_size_and_length(N, T);
  if (!(grading >= 1.0) || !std::isfinite(grading)) throw InvalidArgument("grading must be >= 1");
  if (grading == 1.0) {
    Mesh m = uniform_mesh(N, T);
    return Mesh({m.nodes().begin(), m.nodes().end()}, MeshKind::graded, 1.0);
  }
  // Growth over ceil(N/2) steps from 1 to `grading`; every raw width is >= 1,
  // so their sum is >= N and the rescaled widths stay below grading * T / N.
  const std::size_t ramp = (N + 1) / 2;
  const double ratio = std::pow(grading, 1.0 / static_cast<double>(ramp));
  std::vector<double> widths(N);
  for (std::size_t j = 0; j < N; ++j) {
    widths[j] = j >= ramp ? grading : std::min(grading, std::pow(ratio, static_cast<double>(j)));
  }
  return Mesh(nodes_from_widths(widths, T), MeshKind::graded, grading);
}

std::string MeshValidation::summary() const {
  if (issues.empty()) return "mesh ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i > 0) os << "; ";
    os << issues[i].check << " at j=" << issues[i].index << ": " << issues[i].message;
  }
  return os.str();
}

MeshValidation validate(const Mesh& mesh) {
  MeshValidation report;
  const auto nodes = mesh.nodes();
  if (nodes.size() < 2) {
    report.issues.push_back({"size", 0, "mesh needs at least two nodes"});
    return report;
  }
  if (nodes.front() != 0.0) {
    std::ostringstream os;
    os << "t_0 = " << nodes.front() << " but must be 0";
    report.issues.push_back({"endpoint", 0, os.str()});
  }
  const double T = nodes.back();
  if (!(T > 0.0) || !std::isfinite(T)) {
    report.issues.push_back({"endpoint", nodes.size() - 1, "t_N must be positive and finite"});
    return report;
  }
  const std::size_t N = nodes.size() - 1;
  const double bound = mesh.c_mesh() * T / static_cast<double>(N);
  for (std::size_t j = 1; j <= N; ++j) {
    const double h = nodes[j] - nodes[j - 1];
    std::ostringstream os;
    if (!(h > 0.0)) {
      os << "t_" << j << " = " << nodes[j] << " does not exceed t_" << j - 1 << " = " << nodes[j - 1];
      report.issues.push_back({"monotone", j, os.str()});
    } else if (h > bound * (1.0 + kWidthSlack)) {
      os << "h_" << j << " = " << h << " exceeds c_mesh*T/N = " << bound;
      report.issues.push_back({"width_bound", j, os.str()});
    }
  }
  return report;
}

std::uint64_t derive_mesh_seed(std::uint64_t seed, std::size_t N) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(N) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Mesh make_mesh(const MeshSpec& spec, std::size_t N, double T, std::uint64_t seed) {
  switch (spec.kind) {
    case MeshKind::uniform: return uniform_mesh(N, T);
    case MeshKind::random_quasi_uniform:
      return random_quasi_uniform_mesh(N, T, derive_mesh_seed(seed, N), spec.spread);
    case MeshKind::graded: return graded_mesh(N, T, spec.grading);
    case MeshKind::custom: break;
  }
  throw InvalidArgument("custom meshes are read from a file, not generated");
}

Mesh read_mesh_file(const std::filesystem::path& path, double c_mesh) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open mesh file '" + path.string() + "'");
  std::vector<double> nodes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        nodes.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw InvalidArgument("mesh file '" + path.string() + "' line " + std::to_string(line_no) +
                              ": cannot parse '" + token + "'");
      }
    }
  }
  return Mesh(std::move(nodes), MeshKind::custom, c_mesh);
}

}  // namespace spfit
