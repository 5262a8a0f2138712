#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "dtnfem/msh_io.hpp"
#include "helpers.hpp"

using namespace dtnfem;

namespace {

std::filesystem::path fixture(const char* name) { return std::filesystem::path(DTNFEM_FIXTURE_DIR) / name; }

long parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_msh(in);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal tetrahedron fixture") {
  const auto root = read_msh(fixture("minimal_tet.msh"));
  CHECK(root.vertices.size() == 4);
  CHECK(root.tetrahedra.size() == 1);
  REQUIRE(root.boundary.size() == 4);
  CHECK(root.boundary[0].tag == BoundaryTag::Outer);
  CHECK(root.boundary[1].tag == BoundaryTag::Obstacle);

  Forest forest(root, {});
  CHECK(forest.root_count() == 1);
  const auto mesh = forest.build_closure();
  int boundary_faces = 0;
  for (const auto& f : mesh.faces()) boundary_faces += f.is_boundary();
  CHECK(boundary_faces == 4);
  CHECK(mesh.validate().empty());
}

TEST_CASE("negative-volume tetrahedron is reoriented") {
  const auto root = read_msh(fixture("negative_volume.msh"));
  const auto& t = root.tetrahedra[0];
  CHECK(signed_volume(root.vertices[static_cast<std::size_t>(t[0])], root.vertices[static_cast<std::size_t>(t[1])],
                      root.vertices[static_cast<std::size_t>(t[2])], root.vertices[static_cast<std::size_t>(t[3])]) < 0.0);
  Forest forest(root, {});
  CHECK(forest.volume(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const auto& ids = forest.node(0).vertex_ids;
  CHECK(signed_volume(forest.vertices()[static_cast<std::size_t>(ids[0])], forest.vertices()[static_cast<std::size_t>(ids[1])],
                      forest.vertices()[static_cast<std::size_t>(ids[2])], forest.vertices()[static_cast<std::size_t>(ids[3])]) > 0.0);
  CHECK(forest.build_closure().validate().empty());
}

TEST_CASE("second-order tetrahedra are rejected with the line number") {
  try {
    read_msh(fixture("quadratic_tet.msh"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unsupported element type 11") != std::string::npos);
    CHECK(e.line == 19);
  }
}

TEST_CASE("malformed files") {
  const std::string header = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  CHECK(parse_error_line("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n") == 2);
  CHECK(parse_error_line(header + "$Nodes\n2\n1 0 0 0\n$EndNodes\n") == 7);
  CHECK(parse_error_line(header + "$Nodes\n1\n1 0 0 0\n$EndNodes\n$Elements\n1\n1 2 2 7 1 1 1 1\n$EndElements\n") == 10);
  CHECK(parse_error_line(header + "$Nodes\n1\n1 0 0 0\n$EndNodes\n$Elements\n1\n1 4 0 1 1 1 9\n$EndElements\n") == 10);
  CHECK_THROWS_AS(read_msh(fixture("does_not_exist.msh")), IoError);
}

TEST_CASE("write then read round trip") {
  UChannelParams params;
  params.spacing = 0.05;
  params.radial_layers = 2;
  const auto mesh = generate_u_channel_mesh(params);
  const auto path = std::filesystem::temp_directory_path() / "dtnfem_roundtrip.msh";
  write_msh(mesh, path);
  const auto back = read_msh(path);
  std::filesystem::remove(path);
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  CHECK(back.tetrahedra == mesh.tetrahedra);
  REQUIRE(back.boundary.size() == mesh.boundary.size());
  for (std::size_t i = 0; i < mesh.boundary.size(); ++i) {
    CHECK(back.boundary[i].v == mesh.boundary[i].v);
    CHECK(back.boundary[i].tag == mesh.boundary[i].tag);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) worst = std::max(worst, (back.vertices[i] - mesh.vertices[i]).norm());
  CHECK(worst == 0.0);
}

TEST_CASE("shipped U-channel fixture loads") {
  const auto path = std::filesystem::path(DTNFEM_DATA_DIR) / "u_channel.msh";
  REQUIRE(std::filesystem::exists(path));
  const auto root = read_msh(path);
  SurfaceProjector proj;
  proj.outer_radius = 1.0;
  Forest forest(root, proj);
  CHECK(forest.build_closure().validate().empty());
}
