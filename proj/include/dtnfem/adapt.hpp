#pragma once

// The adaptive loop: solve, estimate, mark, refine.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dtnfem/estimator.hpp"
#include "dtnfem/linsolve.hpp"
#include "dtnfem/problems.hpp"

namespace dtnfem {

enum class Marking { Threshold, Bulk };

const char* to_string(Marking marking);

struct AdaptConfig {
  double tolerance = 1e-3;  // stop once every eta_K <= tolerance
  long max_dof = 200000;    // never solve on a mesh with more dofs
  int max_iterations = 50;
  Marking marking = Marking::Bulk;
  double theta = 0.5;
  double solver_tolerance = 1e-10;
  int quad_degree = kDefaultFaceQuadrature;
  std::optional<int> truncation;  // overrides the automatic choice of N
  SolverOptions solver;

  /// Throws DomainError when tolerance <= 0 or theta is outside (0, 1).
  void validate() const;
};

/// THRESHOLD: {K : eta_K > tolerance}. BULK: the shortest prefix of cells in
/// descending eta_K (ties by id) whose squares reach theta^2 sum eta_K^2.
/// Returned ids are ascending.
std::vector<int> mark(const std::vector<double>& eta, const AdaptConfig& config);

struct HistoryRow {
  int iteration = 0;
  long dof = 0;
  long cells = 0;
  int truncation = 0;
  double eps_N = 0.0;
  double eta = 0.0;
  std::optional<double> e_h;
  double wall_time = 0.0;  // seconds since the start of the run
};

class ConvergenceHistory {
 public:
  /// Rows must have strictly increasing dof counts.
  void append(const HistoryRow& row);
  const std::vector<HistoryRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<HistoryRow> rows_;
};

struct AdaptResult {
  ConvergenceHistory history;
  std::optional<LeafMesh> mesh;  // mesh of the last solve
  DofMap dofs;
  ComplexVector solution;
  IndicatorField indicators;
  ErrorBudget budget;
  double truncation_tail = 0.0;  // ||T_{N+10} u_h - T_N u_h|| on the last mesh
  std::string stop_reason;
};

/// Called after each history row is appended.
using IterationCallback = std::function<void(const HistoryRow&, const LeafMesh&)>;

/// Runs the loop. A solver failure rethrows after `partial` (when given)
/// has received the rows collected so far.
AdaptResult run(const ProblemPreset& problem, const AdaptConfig& config, const IterationCallback& callback = {},
                ConvergenceHistory* partial = nullptr);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dtnfem
