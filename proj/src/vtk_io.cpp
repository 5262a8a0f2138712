#include "dtnfem/vtk_io.hpp"

#include <fstream>
#include <iomanip>

namespace dtnfem {

void write_vtk(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
               const std::vector<double>& cell_eta, const std::filesystem::path& path) {
  if (solution.size() != dofs.size()) throw IoError("solution does not match the dof map");
  if (cell_eta.size() != mesh.cells().size()) throw IoError("indicator field does not match the mesh");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\ndtnfem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << dofs.size() << " double\n";
  for (int v : dofs.dof_to_vertex) {
    const Vec3& x = mesh.vertices()[static_cast<std::size_t>(v)];
    out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
  }
  const auto& subtets = mesh.subtets();
  out << "CELLS " << subtets.size() << ' ' << subtets.size() * 5 << '\n';
  for (const auto& s : subtets)
    out << "4 " << dofs.dof(s.v[0]) << ' ' << dofs.dof(s.v[1]) << ' ' << dofs.dof(s.v[2]) << ' ' << dofs.dof(s.v[3]) << '\n';
  out << "CELL_TYPES " << subtets.size() << '\n';
  for (std::size_t s = 0; s < subtets.size(); ++s) out << "10\n";

  out << "POINT_DATA " << dofs.size() << '\n';
  const auto scalar = [&](const char* name, auto&& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int d = 0; d < dofs.size(); ++d) out << f(solution(d)) << '\n';
  };
  scalar("re_u", [](Complex u) { return u.real(); });
  scalar("im_u", [](Complex u) { return u.imag(); });
  scalar("abs_u", [](Complex u) { return std::abs(u); });

  out << "CELL_DATA " << subtets.size() << '\n';
  out << "SCALARS eta double 1\nLOOKUP_TABLE default\n";
  for (const auto& s : subtets) out << cell_eta[static_cast<std::size_t>(s.cell)] << '\n';
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace dtnfem
