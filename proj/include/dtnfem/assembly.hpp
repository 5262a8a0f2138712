#pragma once

// P1 assembly of
//   a_N(u, v) = (grad u, grad v) - kappa^2 (u, v) - <T_N u, v>_{outer sphere}
// with the truncated DtN term kept in low-rank form
//   <T_N u, v> = R sum_{n<=N} Theta_n sum_m u_n^m conj(v_n^m),
//   u_n^m = sum_j u_j c_{j,nm},  c_{j,nm} = R^-2 int phi_j conj(Y_n^m) ds.

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dtnfem/mesh.hpp"
#include "dtnfem/specfun.hpp"

namespace dtnfem {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using ComplexVector = Eigen::VectorXcd;

/// Neumann data on the obstacle, g(x, nu) with nu the unit normal of the
/// obstacle pointing into the computational domain.
using BoundaryData = std::function<Complex(const Vec3& x, const Vec3& nu)>;

inline constexpr int kDefaultFaceQuadrature = 8;

struct DofMap {
  std::vector<int> vertex_to_dof;  // -1 for vertices outside the active mesh
  std::vector<int> dof_to_vertex;
  std::vector<int> outer_dofs;     // row order of the boundary coupling
  std::vector<int> obstacle_dofs;

  int size() const { return static_cast<int>(dof_to_vertex.size()); }
  int dof(int vertex) const { return vertex_to_dof[static_cast<std::size_t>(vertex)]; }
};

DofMap build_dofmap(const LeafMesh& mesh);

struct ElementMatrices {
  std::vector<int> vertices;  // local ordering = LeafCell::vertices
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

/// Local matrices of one leaf cell, summed over its sub-tetrahedra (4x4 for
/// a plain tetrahedron, 5x5 twin, 7x7 four-tetrahedron).
ElementMatrices element_matrices(const LeafMesh& mesh, int cell);

struct BoundaryCoupling {
  int degree_max = 0;
  double radius = 1.0;
  std::vector<int> dofs;   // global dof of each row
  Eigen::MatrixXcd coeffs;  // rows: outer dofs, columns: harmonic_index(n, m)
};

BoundaryCoupling boundary_coupling(const LeafMesh& mesh, const DofMap& dofs, int degree_max, double radius,
                                   int quad_degree = kDefaultFaceQuadrature);

struct TraceCoefficients {
  int degree_max = 0;
  double radius = 1.0;
  ComplexVector values;

  Complex operator()(int n, int m) const { return values(harmonic_index(n, m)); }
};

TraceCoefficients trace_coefficients(const ComplexVector& solution, const BoundaryCoupling& coupling);

struct AssembledSystem {
  SparseMatrix sparse_part;  // stiffness - kappa^2 mass, complex symmetric
  SparseMatrix outer_mass;   // P1 mass on the outer sphere
  Eigen::SparseMatrix<double> mass;  // P1 volume mass
  BoundaryCoupling dtn;
  ThetaCoefficients theta;
  ComplexVector load;
  double kappa = 0.0;
  int truncation = 0;

  int size() const { return static_cast<int>(sparse_part.rows()); }

  /// D u with D_ij = R sum Theta_n conj(c_{i,nm}) c_{j,nm}.
  ComplexVector dtn_apply(const ComplexVector& u) const;
  /// (sparse_part - D) u.
  ComplexVector apply(const ComplexVector& u) const;
  /// q(u) = u^H D u = R sum Theta_n |u_n^m|^2.
  Complex dtn_form(const ComplexVector& u) const;
  /// Dense D restricted to the outer dofs, in BoundaryCoupling row order.
  Eigen::MatrixXcd dtn_dense_block() const;
};

AssembledSystem assemble(const LeafMesh& mesh, const DofMap& dofs, double kappa, const ThetaCoefficients& theta,
                         BoundaryCoupling coupling, const BoundaryData& g, int quad_degree = kDefaultFaceQuadrature);

/// Nodal interpolant of a function at the dof vertices.
ComplexVector interpolate(const LeafMesh& mesh, const DofMap& dofs, const std::function<Complex(const Vec3&)>& f);

}  // namespace dtnfem
