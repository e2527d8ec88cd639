#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "spfit/error.hpp"
#include "spfit/mesh.hpp"

using namespace spfit;

namespace {

double width_sum(const Mesh& m) {
  double s = 0.0;
  for (std::size_t j = 1; j <= m.intervals(); ++j) s += m.width(j);
  return s;
}

bool has_issue(const MeshValidation& v, const std::string& check) {
  for (const MeshIssue& i : v.issues) {
    if (i.check == check) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("kind names") {
  for (MeshKind k : {MeshKind::uniform, MeshKind::random_quasi_uniform, MeshKind::graded, MeshKind::custom}) {
    CHECK(parse_mesh_kind(mesh_kind_name(k)) == k);
  }
  CHECK(mesh_kind_name(MeshKind::random_quasi_uniform) == "random");
  CHECK_THROWS_AS(parse_mesh_kind("shishkin"), InvalidArgument);
}

TEST_CASE("uniform mesh") {
  const Mesh m = uniform_mesh(10, 2.0);
  CHECK(m.intervals() == 10);
  CHECK(m.node(0) == 0.0);
  CHECK(m.end_time() == 2.0);
  CHECK(m.width(3) == doctest::Approx(0.2));
  CHECK(m.c_mesh() == 1.0);
  CHECK(validate(m).ok());
  CHECK_THROWS_AS(uniform_mesh(0, 1.0), InvalidArgument);
}

TEST_CASE("random mesh with zero spread is uniform") {
  const Mesh r = random_quasi_uniform_mesh(17, 1.0, 99, 0.0);
  const Mesh u = uniform_mesh(17, 1.0);
  for (std::size_t j = 0; j <= 17; ++j) CHECK(r.node(j) == doctest::Approx(u.node(j)).epsilon(1e-15));
}

TEST_CASE("random mesh width bounds, N=8, seed 42") {
  const Mesh m = random_quasi_uniform_mesh(8, 1.0, 42, 0.5);
  CHECK(width_sum(m) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.end_time() == 1.0);
  for (std::size_t j = 1; j <= 8; ++j) {
    CHECK(m.width(j) >= 0.5 / 8 / 1.5);
    CHECK(m.width(j) <= 1.5 / 8 / 0.5);
  }
  CHECK(m.c_mesh() == doctest::Approx(3.0));
  CHECK(m.seed() == 42u);
  CHECK(validate(m).ok());
}

TEST_CASE("random meshes are deterministic and seed dependent") {
  const Mesh a = random_quasi_uniform_mesh(64, 1.0, 7);
  const Mesh b = random_quasi_uniform_mesh(64, 1.0, 7);
  const Mesh c = random_quasi_uniform_mesh(64, 1.0, 8);
  CHECK(std::equal(a.nodes().begin(), a.nodes().end(), b.nodes().begin()));
  CHECK_FALSE(std::equal(a.nodes().begin(), a.nodes().end(), c.nodes().begin()));
  CHECK_THROWS_AS(random_quasi_uniform_mesh(8, 1.0, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(random_quasi_uniform_mesh(8, 1.0, 1, -0.1), InvalidArgument);
}

TEST_CASE("random meshes always satisfy the width bound") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (double spread : {0.1, 0.5, 0.9}) {
      const Mesh m = random_quasi_uniform_mesh(2 + seed % 50, 1.0, seed, spread);
      CHECK(validate(m).ok());
      CHECK(m.max_width() / m.min_width() <= (1 + spread) / (1 - spread) * (1 + 1e-12));
    }
  }
}

TEST_CASE("graded mesh") {
  for (std::size_t N : {1u, 2u, 3u, 16u, 33u, 2048u}) {
    const Mesh m = graded_mesh(N, 1.0, 2.0);
    CAPTURE(N);
    CHECK(m.intervals() == N);
    CHECK(m.end_time() == 1.0);
    CHECK(validate(m).ok());
    CHECK(m.max_width() <= 2.0 / static_cast<double>(N) * (1 + 1e-12));
    for (std::size_t j = 2; j <= N; ++j) CHECK(m.width(j) >= m.width(j - 1) * (1 - 1e-12));
  }
  const Mesh m = graded_mesh(64, 1.0, 2.0);
  CHECK(m.max_width() / m.min_width() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(graded_mesh(8, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("validation names each defect") {
  CHECK(has_issue(validate(Mesh({0.0}, MeshKind::custom, 1.0)), "size"));
  CHECK(has_issue(validate(Mesh({0.1, 0.5, 1.0}, MeshKind::custom, 2.0)), "endpoint"));
  CHECK(has_issue(validate(Mesh({0.0, 0.5, 0.3, 1.0}, MeshKind::custom, 5.0)), "monotone"));
  CHECK(has_issue(validate(Mesh({0.0, 0.5, 0.5, 1.0}, MeshKind::custom, 5.0)), "monotone"));
  CHECK(has_issue(validate(Mesh({0.0, 0.1, 1.0}, MeshKind::custom, 1.0)), "width_bound"));
  const MeshValidation v = validate(Mesh({0.0, 0.5, 0.3, 1.0}, MeshKind::custom, 5.0));
  CHECK(v.summary().find("monotone") != std::string::npos);
}

TEST_CASE("make_mesh") {
  MeshSpec spec;
  spec.kind = MeshKind::random_quasi_uniform;
  const Mesh a = make_mesh(spec, 32, 1.0, 5);
  const Mesh b = make_mesh(spec, 32, 1.0, 5);
  CHECK(std::equal(a.nodes().begin(), a.nodes().end(), b.nodes().begin()));
  CHECK(derive_mesh_seed(5, 32) != derive_mesh_seed(5, 64));
  CHECK(derive_mesh_seed(5, 32) != derive_mesh_seed(6, 32));
  spec.kind = MeshKind::custom;
  CHECK_THROWS_AS(make_mesh(spec, 32, 1.0, 5), InvalidArgument);
}

TEST_CASE("mesh files") {
  const std::string path = "test_mesh_nodes.txt";
  {
    std::ofstream out(path);
    out << "# nodes\n0 0.25\n0.5   # half\n\n1.0\n";
  }
  const Mesh m = read_mesh_file(path, 1.5);
  CHECK(m.kind() == MeshKind::custom);
  CHECK(m.intervals() == 3);
  CHECK(m.node(2) == 0.5);
  CHECK(validate(m).ok());
  {
    std::ofstream out(path);
    out << "0 0.5 x 1\n";
  }
  CHECK_THROWS_AS(read_mesh_file(path, 1.0), InvalidArgument);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_mesh_file("does/not/exist.txt", 1.0), InvalidArgument);
}
