#pragma once

#include <filesystem>
#include <istream>

#include "dtnfem/mesh.hpp"

namespace dtnfem {

/// Physical tags of boundary triangles in MSH files.
struct MshTagMap {
  int obstacle = 1;
  int outer = 2;
};

/// Reads the ASCII MSH 2.2 subset: $Nodes, and $Elements of type 4
/// (tetrahedron) and type 2 (boundary triangle, physical tag mapped through
/// `tags`). Points (15) and lines (1) are skipped; any other element type is
/// rejected. Errors carry the 1-based line number.
RootMesh read_msh(std::istream& in, MshTagMap tags = {});
RootMesh read_msh(const std::filesystem::path& path, MshTagMap tags = {});

/// Writes the same subset (tetrahedra get physical tag 3).
void write_msh(const RootMesh& mesh, const std::filesystem::path& path, MshTagMap tags = {});

}  // namespace dtnfem
