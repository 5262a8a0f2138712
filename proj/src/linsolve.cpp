#include "dtnfem/linsolve.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/CholmodSupport>
#include <Eigen/UmfPackSupport>

namespace dtnfem {
namespace {

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual ComplexVector solve(const ComplexVector& b) const = 0;
};

// UMFPACK keeps pointers into the factored matrix, so the matrix lives here too.
class Lu final : public Preconditioner {
 public:
  explicit Lu(SparseMatrix a) : matrix_(std::move(a)) {
    matrix_.makeCompressed();
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success) throw SolverError("sparse LU factorization failed", 1.0);
  }
  ComplexVector solve(const ComplexVector& b) const override { return lu_.solve(b); }

 private:
  SparseMatrix matrix_;
  Eigen::UmfPackLU<SparseMatrix> lu_;
};

std::unique_ptr<Lu> factorize(SparseMatrix a) { return std::make_unique<Lu>(std::move(a)); }

// Real supernodal Cholesky of stiffness + kappa^2 mass + M_outer / R, applied
// to the real and imaginary parts together.
class ShiftedCholesky final : public Preconditioner {
 public:
  explicit ShiftedCholesky(const AssembledSystem& sys) {
    const double k2 = sys.kappa * sys.kappa;
    Eigen::SparseMatrix<double> a = sys.sparse_part.real() + (2.0 * k2) * sys.mass +
                                    (1.0 / sys.dtn.radius) * Eigen::SparseMatrix<double>(sys.outer_mass.real());
    a.makeCompressed();
    supernodal_.cholmod().print = 0;
    supernodal_.compute(a);
    if (supernodal_.info() == Eigen::Success) return;
    // Some BLAS builds break the supernodal kernels; the simplicial one needs no BLAS.
    use_simplicial_ = true;
    simplicial_.compute(a);
    if (simplicial_.info() != Eigen::Success) throw SolverError("sparse Cholesky factorization failed", 1.0);
  }
  ComplexVector solve(const ComplexVector& b) const override {
    Eigen::MatrixXd parts(b.size(), 2);
    parts.col(0) = b.real();
    parts.col(1) = b.imag();
    const Eigen::MatrixXd x = use_simplicial_ ? Eigen::MatrixXd(simplicial_.solve(parts)) : Eigen::MatrixXd(supernodal_.solve(parts));
    ComplexVector out(b.size());
    out.real() = x.col(0);
    out.imag() = x.col(1);
    return out;
  }

 private:
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>> supernodal_;
  Eigen::CholmodSimplicialLLT<Eigen::SparseMatrix<double>> simplicial_;
  bool use_simplicial_ = false;
};

SparseMatrix merged_matrix(const AssembledSystem& sys) {
  const Eigen::MatrixXcd block = sys.dtn_dense_block();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(sys.sparse_part.nonZeros() + block.size()));
  for (int k = 0; k < sys.sparse_part.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys.sparse_part, k); it; ++it)
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  const auto& dofs = sys.dtn.dofs;
  for (std::size_t j = 0; j < dofs.size(); ++j)
    for (std::size_t i = 0; i < dofs.size(); ++i)
      triplets.emplace_back(dofs[i], dofs[j], -block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  SparseMatrix a(sys.size(), sys.size());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

double relative(const ComplexVector& r, double bnorm) { return r.norm() / bnorm; }

// Restarted GMRES, right preconditioned: A M^{-1} y = b, u = M^{-1} y.
int gmres(const AssembledSystem& sys, const Preconditioner& precond, const ComplexVector& b, ComplexVector& u, double tol,
          int restart, int max_iterations, double& residual) {
  const double bnorm = b.norm();
  const Eigen::Index n = b.size();
  int total = 0;
  ComplexVector r = b - sys.apply(u);
  residual = relative(r, bnorm);
  Eigen::MatrixXcd basis(n, restart + 1);
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(restart + 1, restart);
  std::vector<Complex> cs(static_cast<std::size_t>(restart)), sn(static_cast<std::size_t>(restart));
  ComplexVector gvec(restart + 1);

  while (residual > tol && total < max_iterations) {
    const double beta = r.norm();
    basis.col(0) = r / beta;
    gvec.setZero();
    gvec(0) = beta;
    hess.setZero();
    int k = 0;
    for (; k < restart && total < max_iterations; ++k, ++total) {
      ComplexVector w = sys.apply(precond.solve(basis.col(k).eval()));
      for (int i = 0; i <= k; ++i) {
        hess(i, k) = basis.col(i).dot(w);
        w -= hess(i, k) * basis.col(i);
      }
      // One reorthogonalization pass keeps the basis orthonormal to rounding.
      for (int i = 0; i <= k; ++i) {
        const Complex c = basis.col(i).dot(w);
        hess(i, k) += c;
        w -= c * basis.col(i);
      }
      const double hnext = w.norm();
      hess(k + 1, k) = hnext;
      if (hnext > 0.0) basis.col(k + 1) = w / hnext;
      for (int i = 0; i < k; ++i) {
        const Complex t = std::conj(cs[static_cast<std::size_t>(i)]) * hess(i, k) + std::conj(sn[static_cast<std::size_t>(i)]) * hess(i + 1, k);
        hess(i + 1, k) = -sn[static_cast<std::size_t>(i)] * hess(i, k) + cs[static_cast<std::size_t>(i)] * hess(i + 1, k);
        hess(i, k) = t;
      }
      const Complex a = hess(k, k), bb = hess(k + 1, k);
      const double rho = std::sqrt(std::norm(a) + std::norm(bb));
      if (rho == 0.0) throw SolverError("GMRES breakdown", residual);
      cs[static_cast<std::size_t>(k)] = a / rho;
      sn[static_cast<std::size_t>(k)] = bb / rho;
      hess(k, k) = rho;
      hess(k + 1, k) = 0.0;
      gvec(k + 1) = -sn[static_cast<std::size_t>(k)] * gvec(k);
      gvec(k) = std::conj(cs[static_cast<std::size_t>(k)]) * gvec(k);
      if (std::abs(gvec(k + 1)) / bnorm <= 0.5 * tol || hnext == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    const ComplexVector y = hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(gvec.head(k));
    const ComplexVector z = basis.leftCols(k) * y;
    u += precond.solve(z);
    r = b - sys.apply(u);
    residual = relative(r, bnorm);
  }
  return total;
}

}  // namespace

SolveResult solve(const AssembledSystem& system, double tol, const SolverOptions& options) {
  return solve(system, system.load, tol, options);
}

SolveResult solve(const AssembledSystem& system, const ComplexVector& rhs, double tol, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (!(tol > 0.0)) throw SolverError("tolerance must be positive", std::numeric_limits<double>::infinity());
  if (rhs.size() != system.size()) throw SolverError("right-hand side does not match the system", std::numeric_limits<double>::infinity());

  SolveResult result;
  result.solution = ComplexVector::Zero(system.size());
  const double bnorm = rhs.norm();
  auto finish = [&] {
    result.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };
  if (bnorm == 0.0) return finish();

  const bool direct = options.strategy == SolverStrategy::Direct ||
                      (options.strategy == SolverStrategy::Auto &&
                       static_cast<int>(system.dtn.dofs.size()) <= options.direct_boundary_limit);
  result.report.direct = direct;

  if (direct) {
    const auto lu = factorize(merged_matrix(system));
    ComplexVector& u = result.solution;
    u = lu->solve(rhs);
    ComplexVector r = rhs - system.apply(u);
    double res = relative(r, bnorm);
    for (int step = 0; step < 5 && res > tol; ++step) {
      u += lu->solve(r);
      r = rhs - system.apply(u);
      const double next = relative(r, bnorm);
      if (!(next < res)) {
        res = next;
        break;
      }
      res = next;
    }
    result.report.relative_residual = res;
    if (!(res <= tol)) throw SolverError("direct solve missed the tolerance", res);
    return finish();
  }

  std::unique_ptr<Preconditioner> precond;
  if (options.preconditioner == PreconditionerKind::RobinLu)
    precond = factorize(system.sparse_part - (system.theta[0] / system.dtn.radius) * system.outer_mass);
  else
    precond = std::make_unique<ShiftedCholesky>(system);
  double res = 1.0;
  result.report.iterations =
      gmres(system, *precond, rhs, result.solution, tol, options.restart, options.max_iterations, res);
  result.report.relative_residual = res;
  if (!(res <= tol))
    throw SolverError("GMRES did not converge in " + std::to_string(result.report.iterations) + " iterations", res);
  return finish();
}

}  // namespace dtnfem
