#include "dtnfem/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace dtnfem {

const char* to_string(Marking marking) { return marking == Marking::Bulk ? "bulk" : "threshold"; }

void AdaptConfig::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
  if (max_dof <= 0) throw DomainError("max_dof must be positive");
  if (max_iterations <= 0) throw DomainError("max_iterations must be positive");
  if (truncation && *truncation < 0) throw DomainError("truncation order must be non-negative");
}

std::vector<int> mark(const std::vector<double>& eta, const AdaptConfig& config) {
  std::vector<int> out;
  if (config.marking == Marking::Threshold) {
    for (std::size_t k = 0; k < eta.size(); ++k)
      if (eta[k] > config.tolerance) out.push_back(static_cast<int>(k));
    return out;
  }
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta[static_cast<std::size_t>(a)] > eta[static_cast<std::size_t>(b)];
  });
  double total = 0.0;
  for (double e : eta) total += e * e;
  const double goal = config.theta * config.theta * total;
  double acc = 0.0;
  for (int k : order) {
    if (acc >= goal || eta[static_cast<std::size_t>(k)] <= 0.0) break;
    out.push_back(k);
    acc += eta[static_cast<std::size_t>(k)] * eta[static_cast<std::size_t>(k)];
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ConvergenceHistory::append(const HistoryRow& row) {
  if (!rows_.empty() && row.dof <= rows_.back().dof)
    throw DomainError("history rows need strictly increasing dof counts");
  rows_.push_back(row);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs at least two matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

AdaptResult run(const ProblemPreset& problem, const AdaptConfig& config, const IterationCallback& callback,
                ConvergenceHistory* partial) {
  problem.validate();
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  Forest forest(problem.initial_mesh(), problem.projector());
  LeafMesh mesh = forest.build_closure();

  AdaptResult result;
  const double g_norm = boundary_data_norm(mesh, problem.g, config.quad_degree);
  const int order = config.truncation ? *config.truncation
                                      : choose_truncation(problem.radius, problem.inner_radius, g_norm);
  const auto theta = theta_coefficients(order, problem.kappa * problem.radius);
  result.budget.radius = problem.radius;
  result.budget.inner_radius = problem.inner_radius;
  result.budget.truncation = order;
  result.budget.eps_N = truncation_error(problem.radius, problem.inner_radius, order, g_norm);

  for (int iteration = 0;; ++iteration) {
    DofMap dofs = build_dofmap(mesh);
    auto coupling = boundary_coupling(mesh, dofs, order, problem.radius, config.quad_degree);
    const auto system = assemble(mesh, dofs, problem.kappa, theta, std::move(coupling), problem.g, config.quad_degree);
    SolveResult solved;
    try {
      solved = solve(system, config.solver_tolerance, config.solver);
    } catch (...) {
      if (partial) *partial = result.history;
      throw;
    }
    const auto dtn = make_dtn_context(system, solved.solution);
    const auto jumps = face_jumps(mesh, dofs, solved.solution, &dtn, problem.g, config.quad_degree);
    auto field = indicators(mesh, dofs, solved.solution, jumps, problem.kappa);

    HistoryRow row;
    row.iteration = iteration;
    row.dof = dofs.size();
    row.cells = static_cast<long>(mesh.cells().size());
    row.truncation = order;
    row.eps_N = result.budget.eps_N;
    row.eta = field.global;
    if (problem.exact_gradient) row.e_h = exact_error(mesh, dofs, solved.solution, *problem.exact_gradient);
    row.wall_time = elapsed();
    result.history.append(row);
    if (partial) *partial = result.history;
    if (callback) callback(row, mesh);

    result.budget.eps_h = field.global;
    result.dofs = std::move(dofs);
    result.solution = std::move(solved.solution);
    result.indicators = std::move(field);

    const auto finish = [&](std::string reason) {
      result.truncation_tail = truncation_tail(mesh, result.dofs, result.solution, problem.kappa, problem.radius,
                                               order, 10, config.quad_degree);
      result.stop_reason = std::move(reason);
      result.mesh.emplace(std::move(mesh));
      return std::move(result);
    };

    const auto& eta = result.indicators.cell_eta;
    if (*std::max_element(eta.begin(), eta.end()) <= config.tolerance) return finish("tolerance reached");
    if (iteration + 1 >= config.max_iterations) return finish("iteration cap");
    const auto marked_cells = mark(eta, config);
    if (marked_cells.empty()) return finish("nothing marked");

    std::vector<int> marked_nodes;
    marked_nodes.reserve(marked_cells.size());
    for (int c : marked_cells) marked_nodes.push_back(mesh.cells()[static_cast<std::size_t>(c)].node);

    // Deferred boundary leaves are promoted on the next refine call, so a
    // pass that only defers is followed by one retry.
    std::size_t active = mesh.active_vertices().size();
    LeafMesh next = mesh;
    for (int attempt = 0; attempt < 2; ++attempt) {
      forest.refine(marked_nodes);
      next = forest.leaf_mesh();
      if (next.active_vertices().size() > active) break;
      std::vector<int> still;
      for (int node : marked_nodes)
        if (forest.node(node).is_leaf()) still.push_back(node);
      marked_nodes = std::move(still);
    }
    if (next.active_vertices().size() <= active) return finish("refinement stalled");
    if (static_cast<long>(next.active_vertices().size()) > config.max_dof) return finish("dof cap");
    mesh = std::move(next);
  }
}

}  // namespace dtnfem
