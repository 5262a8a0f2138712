#include <cmath>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "dtnfem/adapt.hpp"
#include "dtnfem/history_io.hpp"
#include "dtnfem/vtk_io.hpp"

namespace fs = std::filesystem;
using namespace dtnfem;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive DtN finite element solver for exterior Helmholtz scattering"};

  int example = 1;
  std::string mesh_path;
  double kappa = kPi;
  std::optional<double> radius, inner_radius;
  std::optional<int> truncation;
  AdaptConfig config;
  std::string marking = "bulk";
  std::string out_dir = "dtnfem_out";
  int shell_resolution = 3;

  app.add_option("--example", example, "Preset problem")->check(CLI::IsMember({1, 2}));
  app.add_option("--mesh", mesh_path, "MSH 2.2 mesh (physical tags 1 obstacle, 2 outer)")->check(CLI::ExistingFile);
  app.add_option("--kappa", kappa, "Wavenumber");
  app.add_option("--radius-R", radius, "Radius of the artificial sphere");
  app.add_option("--radius-Rprime", inner_radius, "Radius of a ball containing the obstacle");
  app.add_option("--truncation-N", truncation, "DtN truncation order (default: automatic)");
  app.add_option("--tol", config.tolerance, "Stop once every eta_K is below this value");
  app.add_option("--theta", config.theta, "Bulk marking parameter");
  app.add_option("--marking", marking, "Marking strategy")->check(CLI::IsMember({"threshold", "bulk"}));
  app.add_option("--max-dof", config.max_dof, "Do not solve on meshes with more dofs");
  app.add_option("--max-iter", config.max_iterations, "Maximum number of adaptive iterations");
  app.add_option("--quad-degree", config.quad_degree, "Face quadrature degree");
  app.add_option("--shell-resolution", shell_resolution, "Initial shell mesh resolution (example 1)");
  app.add_option("--out", out_dir, "Output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    ProblemPreset problem = example == 1 ? example1_preset(kappa) : example2_preset(kappa);
    if (radius) problem.radius = *radius;
    if (inner_radius) problem.inner_radius = *inner_radius;
    if (example == 2 && radius && *radius != 1.0) problem.mesh.reset();
    if (!mesh_path.empty()) problem.mesh = mesh_path;
    problem.shell_resolution = shell_resolution;
    config.truncation = truncation;
    config.marking = marking == "bulk" ? Marking::Bulk : Marking::Threshold;
    problem.validate();
    config.validate();

    fs::create_directories(out_dir);
    std::cout << "problem " << to_string(problem.id) << ", kappa " << problem.kappa << ", R " << problem.radius
              << ", R' " << problem.inner_radius << ", marking " << to_string(config.marking) << '\n';

    const auto result = run(problem, config, [](const HistoryRow& row, const LeafMesh&) {
      std::cout << "iter " << row.iteration << "  dof " << row.dof << "  cells " << row.cells << "  N "
                << row.truncation << "  eta " << row.eta;
      if (row.e_h) std::cout << "  e_h " << *row.e_h;
      std::cout << "  t " << row.wall_time << "s" << std::endl;
    });

    export_csv(result.history, fs::path(out_dir) / "history.csv");
    write_vtk(*result.mesh, result.dofs, result.solution, result.indicators.cell_eta, fs::path(out_dir) / "solution.vtk");
    std::cout << "stopped: " << result.stop_reason << "\n"
              << "eps_h " << result.budget.eps_h << ", eps_N " << result.budget.eps_N << " (N = "
              << result.budget.truncation << "), |T_{N+10} u - T_N u| " << result.truncation_tail << "\n"
              << "wrote " << (fs::path(out_dir) / "history.csv").string() << " and "
              << (fs::path(out_dir) / "solution.vtk").string() << '\n';
  } catch (const DomainError& e) {
    std::cerr << "invalid arguments: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failed: " << e.what() << " (best residual " << e.best_residual << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
