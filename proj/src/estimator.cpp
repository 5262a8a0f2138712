#include "dtnfem/estimator.hpp"

#include <cmath>

#include "dtnfem/quadrature.hpp"

namespace dtnfem {
namespace {

void check_radii(double radius, double inner_radius) {
  if (!(inner_radius > 0.0) || !(radius > inner_radius))
    throw DomainError("truncation needs 0 < R' < R");
}

std::array<Vec3, 3> face_points(const LeafMesh& mesh, const MeshFace& face) {
  std::array<Vec3, 3> x;
  for (int a = 0; a < 3; ++a)
    x[static_cast<std::size_t>(a)] = mesh.vertices()[static_cast<std::size_t>(face.v[static_cast<std::size_t>(a)])];
  return x;
}

Complex trace_value(const DofMap& dofs, const ComplexVector& u, const MeshFace& face, const std::array<double, 3>& l) {
  Complex v{0.0, 0.0};
  for (int a = 0; a < 3; ++a) v += l[static_cast<std::size_t>(a)] * u(dofs.dof(face.v[static_cast<std::size_t>(a)]));
  return v;
}

}  // namespace

int choose_truncation(double radius, double inner_radius, double g_norm, double target) {
  check_radii(radius, inner_radius);
  if (!(g_norm >= 0.0) || !std::isfinite(g_norm)) throw DomainError("boundary data norm must be finite");
  const double ratio = inner_radius / radius;
  int n = 1;
  while (std::pow(ratio, n) * g_norm > target) ++n;
  return n;
}

double truncation_error(double radius, double inner_radius, int order, double g_norm) {
  check_radii(radius, inner_radius);
  return std::pow(inner_radius / radius, order) * g_norm;
}

double boundary_data_norm(const LeafMesh& mesh, const BoundaryData& g, int quad_degree) {
  const auto rule = triangle_rule(quad_degree);
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto& face = mesh.faces()[f];
    if (!face.is_boundary() || face.tag != BoundaryTag::Obstacle) continue;
    const Vec3 nu = -mesh.outward_normal(face.subtet[0], face.local[0]);
    const auto x = face_points(mesh, face);
    const double area = mesh.face_area(static_cast<int>(f));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      sum += area * rule.weights[q] * std::norm(g(l[0] * x[0] + l[1] * x[1] + l[2] * x[2], nu));
    }
  }
  return std::sqrt(sum);
}

const char* to_string(FaceKind kind) {
  switch (kind) {
    case FaceKind::Interior: return "interior";
    case FaceKind::Obstacle: return "obstacle";
    case FaceKind::Outer: return "outer";
  }
  return "?";
}

DtnContext make_dtn_context(const AssembledSystem& system, const ComplexVector& solution) {
  return DtnContext{trace_coefficients(solution, system.dtn), system.theta};
}

Eigen::Vector3cd subtet_gradient(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution, int s) {
  const auto grad = mesh.barycentric_gradients(s);
  const auto& v = mesh.subtets()[static_cast<std::size_t>(s)].v;
  Eigen::Vector3cd out = Eigen::Vector3cd::Zero();
  for (int a = 0; a < 4; ++a)
    out += solution(dofs.dof(v[static_cast<std::size_t>(a)])) * grad[static_cast<std::size_t>(a)].cast<Complex>();
  return out;
}

std::vector<FaceJump> face_jumps(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
                                 const DtnContext* dtn, const BoundaryData& g, int quad_degree) {
  if (solution.size() != dofs.size()) throw EstimatorError("solution does not match the dof map");
  const auto rule = triangle_rule(quad_degree);
  std::vector<Eigen::Vector3cd> grads(mesh.subtets().size());
  for (std::size_t s = 0; s < grads.size(); ++s) grads[s] = subtet_gradient(mesh, dofs, solution, static_cast<int>(s));

  // T_N u = (1/R) sum Theta_n u_n^m Y_n^m, so only the scaled coefficients are needed.
  std::vector<Complex> scaled, y;
  if (dtn) {
    const int nmax = dtn->trace.degree_max;
    if (dtn->theta.order_max < nmax) throw EstimatorError("DtN coefficients shorter than the trace expansion");
    scaled.resize(static_cast<std::size_t>(harmonic_count(nmax)));
    y.resize(scaled.size());
    for (int n = 0; n <= nmax; ++n)
      for (int m = -n; m <= n; ++m)
        scaled[static_cast<std::size_t>(harmonic_index(n, m))] = dtn->theta[n] * dtn->trace(n, m) / dtn->trace.radius;
  }

  std::vector<FaceJump> jumps(mesh.faces().size());
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto& face = mesh.faces()[f];
    auto& jump = jumps[f];
    jump.face = static_cast<int>(f);
    const int s0 = face.subtet[0];
    const Vec3 n0 = mesh.outward_normal(s0, face.local[0]);
    const double area = mesh.face_area(static_cast<int>(f));
    if (!face.is_boundary()) {
      jump.kind = FaceKind::Interior;
      // The two outward normals are opposite, so J = -(grad u_1 - grad u_2) . n_1.
      const Complex j = -(grads[static_cast<std::size_t>(s0)] - grads[static_cast<std::size_t>(face.subtet[1])]).dot(n0.cast<Complex>());
      jump.norm = std::abs(j) * std::sqrt(area);
      continue;
    }
    const auto x = face_points(mesh, face);
    const Complex grad_n = n0.cast<Complex>().dot(grads[static_cast<std::size_t>(s0)]);
    double sum = 0.0;
    if (face.tag == BoundaryTag::Obstacle) {
      jump.kind = FaceKind::Obstacle;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& l = rule.points[q];
        const Complex j = 2.0 * (-grad_n + g(l[0] * x[0] + l[1] * x[1] + l[2] * x[2], -n0));
        sum += rule.weights[q] * std::norm(j);
      }
    } else if (face.tag == BoundaryTag::Outer) {
      jump.kind = FaceKind::Outer;
      if (!dtn) throw EstimatorError("outer faces need trace coefficients");
      const int nmax = dtn->trace.degree_max;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& l = rule.points[q];
        spherical_harmonics_at(nmax, l[0] * x[0] + l[1] * x[1] + l[2] * x[2], y);
        Complex tu{0.0, 0.0};
        for (std::size_t k = 0; k < y.size(); ++k) tu += scaled[k] * y[k];
        sum += rule.weights[q] * std::norm(2.0 * (tu - grad_n));
      }
    } else {
      throw EstimatorError("untagged boundary face " + std::to_string(f));
    }
    jump.norm = std::sqrt(area * sum);
  }
  return jumps;
}

IndicatorField indicators(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
                          const std::vector<FaceJump>& jumps, double kappa) {
  if (jumps.size() != mesh.faces().size()) throw EstimatorError("jumps do not cover every face");
  IndicatorField field;
  field.subtet_eta.resize(mesh.subtets().size());
  const double k2 = kappa * kappa;
  for (std::size_t s = 0; s < mesh.subtets().size(); ++s) {
    const auto& v = mesh.subtets()[s].v;
    std::array<Complex, 4> u;
    for (int a = 0; a < 4; ++a) u[static_cast<std::size_t>(a)] = solution(dofs.dof(v[static_cast<std::size_t>(a)]));
    // u^H M u with M = vol/20 (1 + delta).
    Complex sum{0.0, 0.0};
    double diag = 0.0;
    for (const auto& ua : u) {
      sum += ua;
      diag += std::norm(ua);
    }
    const double l2sq = mesh.subtet_volume(static_cast<int>(s)) / 20.0 * (std::norm(sum) + diag);
    const double volume_term = mesh.subtet_diameter(static_cast<int>(s)) * k2 * std::sqrt(std::max(l2sq, 0.0));
    double face_sum = 0.0;
    for (int f : mesh.subtet_faces(static_cast<int>(s))) {
      const double jn = jumps[static_cast<std::size_t>(f)].norm;
      face_sum += 0.5 * mesh.face_diameter(f) * jn * jn;
    }
    field.subtet_eta[s] = volume_term + std::sqrt(face_sum);
  }
  field.cell_eta.resize(mesh.cells().size());
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.cells().size(); ++c) {
    const auto& cell = mesh.cells()[c];
    double sq = 0.0;
    for (int s = cell.first_subtet; s < cell.first_subtet + cell.subtet_count; ++s)
      sq += field.subtet_eta[static_cast<std::size_t>(s)] * field.subtet_eta[static_cast<std::size_t>(s)];
    field.cell_eta[c] = std::sqrt(sq);
    total += sq;
  }
  field.global = std::sqrt(total);
  return field;
}

double exact_error(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution,
                   const GradientField& gradient, int quad_degree) {
  const auto rule = tetrahedron_rule(std::max(quad_degree, 4));
  double sum = 0.0;
  for (std::size_t s = 0; s < mesh.subtets().size(); ++s) {
    const auto gh = subtet_gradient(mesh, dofs, solution, static_cast<int>(s));
    const auto& v = mesh.subtets()[s].v;
    const double vol = mesh.subtet_volume(static_cast<int>(s));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Vec3 x = Vec3::Zero();
      for (int a = 0; a < 4; ++a)
        x += rule.points[q][static_cast<std::size_t>(a)] * mesh.vertices()[static_cast<std::size_t>(v[static_cast<std::size_t>(a)])];
      sum += vol * rule.weights[q] * (gradient(x) - gh).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double truncation_tail(const LeafMesh& mesh, const DofMap& dofs, const ComplexVector& solution, double kappa,
                       double radius, int order, int extra, int quad_degree) {
  const int top = order + extra;
  const auto theta = theta_coefficients(top, kappa * radius);
  const auto rule = triangle_rule(quad_degree);
  std::vector<Complex> y(static_cast<std::size_t>(harmonic_count(top)));
  std::vector<Complex> coeff(y.size(), Complex{0.0, 0.0});
  const double inv_r2 = 1.0 / (radius * radius);
  const int first = harmonic_count(order);
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto& face = mesh.faces()[f];
    if (!face.is_boundary() || face.tag != BoundaryTag::Outer) continue;
    const auto x = face_points(mesh, face);
    const double area = mesh.face_area(static_cast<int>(f));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      spherical_harmonics_at(top, l[0] * x[0] + l[1] * x[1] + l[2] * x[2], y);
      const Complex u = trace_value(dofs, solution, face, l) * (area * rule.weights[q] * inv_r2);
      for (std::size_t k = static_cast<std::size_t>(first); k < y.size(); ++k) coeff[k] += u * std::conj(y[k]);
    }
  }
  // ||sum (Theta_n / R) c Y||^2 over the sphere of radius R = sum |Theta_n c|^2.
  double sum = 0.0;
  for (int n = order + 1; n <= top; ++n)
    for (int m = -n; m <= n; ++m) sum += std::norm(theta[n] * coeff[static_cast<std::size_t>(harmonic_index(n, m))]);
  return std::sqrt(sum);
}

}  // namespace dtnfem
