#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spfit {

enum class MeshKind { uniform, random_quasi_uniform, graded, custom };

/// CLI spelling: uniform | random | graded | custom.
std::string_view mesh_kind_name(MeshKind kind);
MeshKind parse_mesh_kind(std::string_view name);

/// Name of the generator behind random meshes, recorded in reports.
inline constexpr std::string_view kMeshPrng = "mt19937_64";

/// Nodes 0 = t_0 < t_1 < ... < t_N = T.
///
/// c_mesh is the quasi-uniformity constant: a valid mesh has every width
/// h_j = t_j - t_{j-1} at most c_mesh * T / N. Construction does not
/// validate; call validate() before handing a mesh to a solver.
class Mesh {
 public:
  Mesh(std::vector<double> nodes, MeshKind kind, double c_mesh,
       std::optional<std::uint64_t> seed = std::nullopt);

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t j) const { return nodes_[j]; }
  /// Number of intervals N.
  std::size_t intervals() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }
  double end_time() const { return nodes_.empty() ? 0.0 : nodes_.back(); }
  /// h_j for 1 <= j <= N.
  double width(std::size_t j) const { return nodes_[j] - nodes_[j - 1]; }
  double max_width() const;
  double min_width() const;

  MeshKind kind() const { return kind_; }
  double c_mesh() const { return c_mesh_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  std::vector<double> nodes_;
  MeshKind kind_;
  double c_mesh_;
  std::optional<std::uint64_t> seed_;
};

/// h_j = T / N.
Mesh uniform_mesh(std::size_t N, double T);

/// Raw widths drawn uniformly from [1 - spread, 1 + spread] and rescaled to
/// sum to T. c_mesh = (1 + spread) / (1 - spread). Deterministic in seed.
Mesh random_quasi_uniform_mesh(std::size_t N, double T, std::uint64_t seed, double spread = 0.5);

/// Widths grow geometrically from t = 0 over the first half of the mesh up to
/// `grading` times the first width, then stay constant. h_j is nondecreasing,
/// max h_j <= grading * T / N and c_mesh = grading.
Mesh graded_mesh(std::size_t N, double T, double grading);

struct MeshIssue {
  std::string check;   ///< "size", "endpoint", "monotone" or "width_bound"
  std::size_t index;   ///< offending node or interval index
  std::string message;
};

struct MeshValidation {
  std::vector<MeshIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// Checks t_0 = 0, strict monotonicity and h_j <= c_mesh * T / N.
MeshValidation validate(const Mesh& mesh);

/// Mesh family parameters shared by the table builders and the CLI.
struct MeshSpec {
  MeshKind kind = MeshKind::uniform;
  double spread = 0.5;
  double grading = 2.0;
};

/// Mesh with N intervals from a family. Random meshes of different N draw
/// from independent streams derived from (seed, N).
Mesh make_mesh(const MeshSpec& spec, std::size_t N, double T, std::uint64_t seed);

/// Stream seed used by make_mesh for a random mesh with N intervals.
std::uint64_t derive_mesh_seed(std::uint64_t seed, std::size_t N);

/// Reads whitespace separated node values; '#' starts a comment. The result
/// is a custom mesh with the given c_mesh and is not validated.
Mesh read_mesh_file(const std::filesystem::path& path, double c_mesh);

}  // namespace spfit
