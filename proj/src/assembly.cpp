#include "dtnfem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "dtnfem/quadrature.hpp"

namespace dtnfem {

DofMap build_dofmap(const LeafMesh& mesh) {
  DofMap map;
  map.vertex_to_dof.assign(mesh.vertices().size(), -1);
  for (int v : mesh.active_vertices()) {
    map.vertex_to_dof[static_cast<std::size_t>(v)] = static_cast<int>(map.dof_to_vertex.size());
    map.dof_to_vertex.push_back(v);
  }
  std::vector<char> outer(map.dof_to_vertex.size(), 0), obstacle(map.dof_to_vertex.size(), 0);
  for (const auto& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    for (int v : f.v) {
      const auto d = static_cast<std::size_t>(map.dof(v));
      if (f.tag == BoundaryTag::Outer) outer[d] = 1;
      if (f.tag == BoundaryTag::Obstacle) obstacle[d] = 1;
    }
  }
  for (std::size_t d = 0; d < outer.size(); ++d) {
    if (outer[d]) map.outer_dofs.push_back(static_cast<int>(d));
    if (obstacle[d]) map.obstacle_dofs.push_back(static_cast<int>(d));
  }
  return map;
}

ElementMatrices element_matrices(const LeafMesh& mesh, int cell_id) {
  const auto& cell = mesh.cells()[static_cast<std::size_t>(cell_id)];
  ElementMatrices out;
  out.vertices = cell.vertices;
  const auto n = static_cast<Eigen::Index>(cell.vertices.size());
  out.stiffness = Eigen::MatrixXd::Zero(n, n);
  out.mass = Eigen::MatrixXd::Zero(n, n);
  for (int s = cell.first_subtet; s < cell.first_subtet + cell.subtet_count; ++s) {
    const double vol = mesh.subtet_volume(s);
    if (!(vol > 0.0))
      throw AssemblyError("cell " + std::to_string(cell_id) + " has a degenerate sub-tetrahedron");
    const auto grad = mesh.barycentric_gradients(s);
    const auto& v = mesh.subtets()[static_cast<std::size_t>(s)].v;
    std::array<Eigen::Index, 4> local{};
    for (int a = 0; a < 4; ++a)
      local[static_cast<std::size_t>(a)] = std::find(cell.vertices.begin(), cell.vertices.end(), v[static_cast<std::size_t>(a)]) - cell.vertices.begin();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        out.stiffness(local[static_cast<std::size_t>(a)], local[static_cast<std::size_t>(b)]) +=
            vol * grad[static_cast<std::size_t>(a)].dot(grad[static_cast<std::size_t>(b)]);
        out.mass(local[static_cast<std::size_t>(a)], local[static_cast<std::size_t>(b)]) += vol / 20.0 * (a == b ? 2.0 : 1.0);
      }
  }
  return out;
}

BoundaryCoupling boundary_coupling(const LeafMesh& mesh, const DofMap& dofs, int degree_max, double radius,
                                   int quad_degree) {
  if (degree_max < 0) throw AssemblyError("truncation order must be non-negative");
  if (dofs.outer_dofs.empty()) throw AssemblyError("mesh has no outer boundary faces");

  BoundaryCoupling c;
  c.degree_max = degree_max;
  c.radius = radius;
  c.dofs = dofs.outer_dofs;
  std::vector<int> row_of(static_cast<std::size_t>(dofs.size()), -1);
  for (std::size_t r = 0; r < c.dofs.size(); ++r) row_of[static_cast<std::size_t>(c.dofs[r])] = static_cast<int>(r);

  const int h = harmonic_count(degree_max);
  c.coeffs = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(c.dofs.size()), h);
  const auto rule = triangle_rule(quad_degree);
  std::vector<Complex> y(static_cast<std::size_t>(h));
  const double inv_r2 = 1.0 / (radius * radius);

  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto& face = mesh.faces()[f];
    if (!face.is_boundary() || face.tag != BoundaryTag::Outer) continue;
    const double area = mesh.face_area(static_cast<int>(f));
    std::array<Vec3, 3> x;
    std::array<Eigen::Index, 3> rows{};
    for (int a = 0; a < 3; ++a) {
      x[static_cast<std::size_t>(a)] = mesh.vertices()[static_cast<std::size_t>(face.v[static_cast<std::size_t>(a)])];
      rows[static_cast<std::size_t>(a)] = row_of[static_cast<std::size_t>(dofs.dof(face.v[static_cast<std::size_t>(a)]))];
    }
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec3 p = l[0] * x[0] + l[1] * x[1] + l[2] * x[2];
      spherical_harmonics_at(degree_max, p, y);
      for (int a = 0; a < 3; ++a) {
        const double w = area * rule.weights[q] * l[static_cast<std::size_t>(a)] * inv_r2;
        auto row = c.coeffs.row(rows[static_cast<std::size_t>(a)]);
        for (int k = 0; k < h; ++k) row(k) += w * std::conj(y[static_cast<std::size_t>(k)]);
      }
    }
  }
  return c;
}

TraceCoefficients trace_coefficients(const ComplexVector& solution, const BoundaryCoupling& coupling) {
  ComplexVector boundary(static_cast<Eigen::Index>(coupling.dofs.size()));
  for (std::size_t r = 0; r < coupling.dofs.size(); ++r) {
    if (coupling.dofs[r] >= solution.size()) throw AssemblyError("solution does not match the dof map");
    boundary(static_cast<Eigen::Index>(r)) = solution(coupling.dofs[r]);
  }
  TraceCoefficients t;
  t.degree_max = coupling.degree_max;
  t.radius = coupling.radius;
  t.values = coupling.coeffs.transpose() * boundary;
  return t;
}

ComplexVector AssembledSystem::dtn_apply(const ComplexVector& u) const {
  const auto trace = trace_coefficients(u, dtn);
  ComplexVector scaled = trace.values;
  for (int n = 0; n <= dtn.degree_max; ++n)
    for (int m = -n; m <= n; ++m) scaled(harmonic_index(n, m)) *= dtn.radius * theta[n];
  const ComplexVector boundary = dtn.coeffs.conjugate() * scaled;
  ComplexVector out = ComplexVector::Zero(u.size());
  for (std::size_t r = 0; r < dtn.dofs.size(); ++r) out(dtn.dofs[r]) = boundary(static_cast<Eigen::Index>(r));
  return out;
}

ComplexVector AssembledSystem::apply(const ComplexVector& u) const {
  ComplexVector out = sparse_part * u;
  out -= dtn_apply(u);
  return out;
}

Complex AssembledSystem::dtn_form(const ComplexVector& u) const {
  const auto trace = trace_coefficients(u, dtn);
  Complex q{0.0, 0.0};
  for (int n = 0; n <= dtn.degree_max; ++n) {
    double power = 0.0;
    for (int m = -n; m <= n; ++m) power += std::norm(trace(n, m));
    q += theta[n] * power;
  }
  return dtn.radius * q;
}

Eigen::MatrixXcd AssembledSystem::dtn_dense_block() const {
  Eigen::VectorXcd weights(dtn.coeffs.cols());
  for (int n = 0; n <= dtn.degree_max; ++n)
    for (int m = -n; m <= n; ++m) weights(harmonic_index(n, m)) = dtn.radius * theta[n];
  return dtn.coeffs.conjugate() * weights.asDiagonal() * dtn.coeffs.transpose();
}

AssembledSystem assemble(const LeafMesh& mesh, const DofMap& dofs, double kappa, const ThetaCoefficients& theta,
                         BoundaryCoupling coupling, const BoundaryData& g, int quad_degree) {
  if (theta.order_max < coupling.degree_max)
    throw AssemblyError("DtN coefficients stop at order " + std::to_string(theta.order_max) +
                        " but the coupling needs " + std::to_string(coupling.degree_max));
  if (static_cast<std::size_t>(dofs.size()) != mesh.active_vertices().size())
    throw AssemblyError("dof map does not match the mesh");

  const auto n = static_cast<Eigen::Index>(dofs.size());
  const double k2 = kappa * kappa;
  std::vector<Eigen::Triplet<Complex>> triplets;
  std::vector<Eigen::Triplet<double>> mass_triplets;
  triplets.reserve(mesh.subtets().size() * 16);
  mass_triplets.reserve(mesh.subtets().size() * 16);
  for (std::size_t s = 0; s < mesh.subtets().size(); ++s) {
    const double vol = mesh.subtet_volume(static_cast<int>(s));
    if (!(vol > 0.0))
      throw AssemblyError("cell " + std::to_string(mesh.subtets()[s].cell) + " has a degenerate sub-tetrahedron");
    const auto grad = mesh.barycentric_gradients(static_cast<int>(s));
    const auto& v = mesh.subtets()[s].v;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double stiff = vol * grad[static_cast<std::size_t>(a)].dot(grad[static_cast<std::size_t>(b)]);
        const double mass = vol / 20.0 * (a == b ? 2.0 : 1.0);
        const int i = dofs.dof(v[static_cast<std::size_t>(a)]), j = dofs.dof(v[static_cast<std::size_t>(b)]);
        triplets.emplace_back(i, j, Complex(stiff - k2 * mass, 0.0));
        mass_triplets.emplace_back(i, j, mass);
      }
  }

  AssembledSystem sys;
  sys.kappa = kappa;
  sys.truncation = coupling.degree_max;
  sys.theta = theta;
  sys.sparse_part.resize(n, n);
  sys.sparse_part.setFromTriplets(triplets.begin(), triplets.end());
  sys.mass.resize(n, n);
  sys.mass.setFromTriplets(mass_triplets.begin(), mass_triplets.end());

  const auto rule = triangle_rule(quad_degree);
  std::vector<Eigen::Triplet<Complex>> boundary_triplets;
  sys.load = ComplexVector::Zero(n);
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto& face = mesh.faces()[f];
    if (!face.is_boundary()) continue;
    const double area = mesh.face_area(static_cast<int>(f));
    if (face.tag == BoundaryTag::Outer) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          boundary_triplets.emplace_back(dofs.dof(face.v[static_cast<std::size_t>(a)]), dofs.dof(face.v[static_cast<std::size_t>(b)]),
                                         Complex(area / 12.0 * (a == b ? 2.0 : 1.0), 0.0));
    } else if (face.tag == BoundaryTag::Obstacle) {
      const Vec3 nu = -mesh.outward_normal(face.subtet[0], face.local[0]);
      std::array<Vec3, 3> x;
      for (int a = 0; a < 3; ++a) x[static_cast<std::size_t>(a)] = mesh.vertices()[static_cast<std::size_t>(face.v[static_cast<std::size_t>(a)])];
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& l = rule.points[q];
        const Complex gq = g(l[0] * x[0] + l[1] * x[1] + l[2] * x[2], nu);
        for (int a = 0; a < 3; ++a)
          sys.load(dofs.dof(face.v[static_cast<std::size_t>(a)])) += area * rule.weights[q] * l[static_cast<std::size_t>(a)] * gq;
      }
    }
  }
  sys.outer_mass.resize(n, n);
  sys.outer_mass.setFromTriplets(boundary_triplets.begin(), boundary_triplets.end());
  sys.dtn = std::move(coupling);
  return sys;
}

ComplexVector interpolate(const LeafMesh& mesh, const DofMap& dofs, const std::function<Complex(const Vec3&)>& f) {
  ComplexVector u(dofs.size());
  for (int d = 0; d < dofs.size(); ++d) u(d) = f(mesh.vertices()[static_cast<std::size_t>(dofs.dof_to_vertex[static_cast<std::size_t>(d)])]);
  return u;
}

}  // namespace dtnfem
