#pragma once

// Residual a posteriori estimator
//   eta_K = h_K ||(Delta + kappa^2) u_h||_K + (1/2 sum_{F in dK} h_F ||J_F||_F^2)^{1/2}
// evaluated on the sub-tetrahedra of the leaf mesh, and the truncation
// budget eps_N = (R'/R)^N ||g||_{L2(dD)}.

#include <functional>
#include <vector>

#include "dtnfem/assembly.hpp"

namespace dtnfem {

inline constexpr double kTruncationTarget = 1e-8;

/// Smallest N >= 1 with (R'/R)^N g_norm <= target.
int choose_truncation(double radius, double inner_radius, double g_norm, double target = kTruncationTarget);

/// (R'/R)^N g_norm.
double truncation_error(double radius, double inner_radius, int order, double g_norm);

/// ||g||_{L2} over the (polyhedral) obstacle faces.
double boundary_data_norm(const LeafMesh& mesh, const BoundaryData& g, int quad_degree = kDefaultFaceQuadrature);

enum class FaceKind { Interior, Obstacle, Outer };

const char* to_string(FaceKind kind);

struct FaceJump {
  int face = -1;
  FaceKind kind = FaceKind::Interior;
  double norm = 0.0;  // ||J_F||_{L2(F)}
};

/// Everything needed to evaluate T_N u_h on the outer sphere.
struct DtnContext {
  TraceCoefficients trace;
  ThetaCoefficients theta;
};

DtnContext make_dtn_context(const AssembledSystem& system, const ComplexVector& solution);

/// Jumps for every face of the leaf mesh, indexed by face id.
///   interior  J_F = -(grad u_1 . n_1 + grad u_2 . n_2)
///   obstacle  J_F = 2 (grad u_h . nu + g),   nu pointing into the domain
///   outer     J_F = 2 (T_N u_h - grad u_h . nu),  nu the outward normal
/// `dtn` may be null only when the mesh has no outer faces.
std::vector<FaceJump> face_jumps(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
                                 const DtnContext* dtn, const BoundaryData& g,
                                 int quad_degree = kDefaultFaceQuadrature);

struct IndicatorField {
  std::vector<double> subtet_eta;
  std::vector<double> cell_eta;  // sqrt of the sum of its sub-tetrahedra's squares
  double global = 0.0;           // (sum eta_K^2)^{1/2}
};

/// For P1 the volume residual reduces to h kappa^2 ||u_h||, computed from
/// the exact P1 mass matrix.
IndicatorField indicators(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
                          const std::vector<FaceJump>& jumps, double kappa);

using GradientField = std::function<Eigen::Vector3cd(const Vec3&)>;

/// ||grad(u - u_h)||_{L2} by tetrahedral quadrature (degree >= 4).
double exact_error(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
                   const GradientField& gradient, int quad_degree = 6);

/// Constant gradient of u_h on sub-tet s.
Eigen::Vector3cd subtet_gradient(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution, int s);

/// ||T_{N+extra} u_h - T_N u_h||_{L2(outer sphere)}, with the trace
/// coefficients of orders N+1..N+extra integrated directly.
double truncation_tail(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution, double kappa,
                       double radius, int order, int extra = 10, int quad_degree = kDefaultFaceQuadrature);

struct ErrorBudget {
  double eps_h = 0.0;
  double eps_N = 0.0;
  double radius = 1.0;
  double inner_radius = 0.0;
  int truncation = 0;
};

}  // namespace dtnfem
