#pragma once

#include "dtnfem/assembly.hpp"

namespace dtnfem {

struct SolveReport {
  int iterations = 0;  // 0 for the direct path
  double relative_residual = 0.0;
  double wall_time = 0.0;  // seconds
  bool direct = true;
};

enum class SolverStrategy { Auto, Direct, Iterative };

/// GMRES preconditioner: real Cholesky of stiffness + kappa^2 mass + M_outer / R
/// (default), or complex LU of sparse_part - (Theta_0 / R) M_outer.
enum class PreconditionerKind { ShiftedLaplacian, RobinLu };

struct SolverOptions {
  SolverStrategy strategy = SolverStrategy::Auto;
  /// Auto picks the direct path while the outer-boundary dof count stays at
  /// or below this limit.
  int direct_boundary_limit = 500;
  PreconditionerKind preconditioner = PreconditionerKind::ShiftedLaplacian;
  int restart = 80;
  int max_iterations = 3000;
};

struct SolveResult {
  ComplexVector solution;
  SolveReport report;
};

/// Solves (sparse_part - D) u = load to ||A u - b|| <= tol ||b||.
///
/// Direct path: sparse LU of sparse_part with the dense outer-boundary block
/// merged in, followed by iterative refinement. Iterative path: restarted
/// GMRES with right preconditioning (see PreconditionerKind), applying D
/// matrix-free.
SolveResult solve(const AssembledSystem& system, double tol = 1e-10, const SolverOptions& options = {});

/// Same operator, arbitrary right-hand side.
SolveResult solve(const AssembledSystem& system, const ComplexVector& rhs, double tol,
                  const SolverOptions& options = {});

}  // namespace dtnfem
