#include "dtnfem/problems.hpp"

#include <cmath>

#include "dtnfem/msh_io.hpp"

namespace dtnfem {

Complex boundary_data_example1(const Vec3& x, double kappa) {
  const double r = x.norm();
  return -std::exp(kI * kappa * r) * (kI * kappa * r - 1.0) / (r * r);
}

Complex boundary_data_example2(const Vec3& x, const Vec3& nu, double kappa) {
  return kI * kappa * nu.z() * std::exp(kI * kappa * x.z());
}

Complex monopole(const Vec3& x, double kappa) {
  const double r = x.norm();
  return std::exp(kI * kappa * r) / r;
}

Eigen::Vector3cd monopole_gradient(const Vec3& x, double kappa) {
  const double r = x.norm();
  const Complex radial = std::exp(kI * kappa * r) * (kI * kappa * r - 1.0) / (r * r);
  return (radial / r) * x.cast<Complex>();
}

const char* to_string(ProblemId id) {
  switch (id) {
    case ProblemId::Example1: return "example1";
    case ProblemId::Example2: return "example2";
    case ProblemId::Custom: return "custom";
  }
  return "?";
}

void ProblemPreset::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (!(inner_radius > 0.0) || !(radius > inner_radius)) throw DomainError("need 0 < R' < R");
  if (obstacle_radius && !(*obstacle_radius > 0.0 && *obstacle_radius <= inner_radius))
    throw DomainError("the obstacle radius must lie in (0, R']");
  if (!g) throw DomainError("boundary data missing");
}

SurfaceProjector ProblemPreset::projector() const {
  SurfaceProjector p;
  p.outer_radius = radius;
  p.obstacle_radius = obstacle_radius;
  return p;
}

RootMesh ProblemPreset::initial_mesh() const {
  if (mesh) return read_msh(*mesh);
  if (obstacle_radius) return generate_shell_mesh(*obstacle_radius, radius, shell_resolution);
  if (id == ProblemId::Example2) {
    UChannelParams params;
    params.outer_radius = radius;
    return generate_u_channel_mesh(params);
  }
  throw DomainError("no mesh source for this problem");
}

ProblemPreset example1_preset(double kappa, double radius, double inner_radius) {
  ProblemPreset p;
  p.id = ProblemId::Example1;
  p.kappa = kappa;
  p.radius = radius;
  p.inner_radius = inner_radius;
  p.obstacle_radius = 0.5;
  p.g = [kappa](const Vec3& x, const Vec3&) { return boundary_data_example1(x, kappa); };
  p.exact_gradient = [kappa](const Vec3& x) { return monopole_gradient(x, kappa); };
  return p;
}

ProblemPreset example2_preset(double kappa, double radius, double inner_radius) {
  ProblemPreset p;
  p.id = ProblemId::Example2;
  p.kappa = kappa;
  p.radius = radius;
  p.inner_radius = inner_radius;
  const auto fixture = default_u_channel_path();
  if (radius == 1.0 && std::filesystem::exists(fixture)) p.mesh = fixture;
  p.g = [kappa](const Vec3& x, const Vec3& nu) { return boundary_data_example2(x, nu, kappa); };
  return p;
}

std::filesystem::path default_u_channel_path() { return std::filesystem::path(DTNFEM_DATA_DIR) / "u_channel.msh"; }

}  // namespace dtnfem
