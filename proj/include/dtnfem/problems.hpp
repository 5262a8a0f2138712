#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dtnfem/assembly.hpp"
#include "dtnfem/estimator.hpp"
#include "dtnfem/mesh.hpp"

namespace dtnfem {

/// g = -d/dr (e^{i kappa r} / r) = -e^{i kappa r} (i kappa r - 1) / r^2 at r = |x|.
Complex boundary_data_example1(const Vec3& x, double kappa);

/// g = d/dnu e^{i kappa x_3} = i kappa nu_3 e^{i kappa x_3}.
Complex boundary_data_example2(const Vec3& x, const Vec3& nu, double kappa);

/// The radiating monopole e^{i kappa r} / r and its gradient.
Complex monopole(const Vec3& x, double kappa);
Eigen::Vector3cd monopole_gradient(const Vec3& x, double kappa);

enum class ProblemId { Example1, Example2, Custom };

const char* to_string(ProblemId id);

struct ProblemPreset {
  ProblemId id = ProblemId::Example1;
  double kappa = kPi;
  double radius = 1.0;        // R, the artificial sphere
  double inner_radius = 0.5;  // R', radius of a ball containing the obstacle
  std::optional<double> obstacle_radius;     // spherical obstacle, projected on refinement
  std::optional<std::filesystem::path> mesh;  // MSH file; otherwise the built-in generator
  int shell_resolution = 3;
  BoundaryData g;
  std::optional<GradientField> exact_gradient;

  /// Throws DomainError on R' >= R, kappa <= 0, or a spherical obstacle
  /// that does not fit inside R'.
  void validate() const;
  SurfaceProjector projector() const;
  RootMesh initial_mesh() const;
};

/// kappa = pi, D = B_0.5, R = 1, R' = 0.5, exact solution available.
ProblemPreset example1_preset(double kappa = kPi, double radius = 1.0, double inner_radius = 0.5);

/// kappa = pi, U-channel obstacle in [-0.25, 0.25]^3, R = 1, R' = sqrt(3)/4,
/// incident plane wave e^{i kappa x_3}.
ProblemPreset example2_preset(double kappa = kPi, double radius = 1.0, double inner_radius = std::sqrt(3.0) / 4.0);

/// Location of the shipped U-channel fixture.
std::filesystem::path default_u_channel_path();

}  // namespace dtnfem
