#pragma once

#include <filesystem>
#include <vector>

#include "dtnfem/assembly.hpp"

namespace dtnfem {

/// Legacy ASCII unstructured grid. Points are the dof vertices in dof order,
/// cells are the sub-tetrahedra (transitional elements split). Point data:
/// re_u, im_u, abs_u; cell data: eta (eta_K of the owning leaf cell).
void write_vtk(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
               const std::vector<double>& cell_eta, const std::filesystem::path& path);

}  // namespace dtnfem
