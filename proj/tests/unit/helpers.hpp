#pragma once

#include <random>
#include <vector>

#include "dtnfem/mesh.hpp"

namespace testing {

using dtnfem::BoundaryTag;
using dtnfem::Vec3;

// (0,0,0), (1,0,0), (0,1,0), (0,0,1) with every face tagged.
inline dtnfem::RootMesh reference_tet(BoundaryTag tag = BoundaryTag::Outer) {
  dtnfem::RootMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.tetrahedra = {{0, 1, 2, 3}};
  m.boundary = {{{1, 2, 3}, tag}, {{0, 2, 3}, tag}, {{0, 1, 3}, tag}, {{0, 1, 2}, tag}};
  return m;
}

inline dtnfem::SurfaceProjector sphere_projector(double inner, double outer) {
  dtnfem::SurfaceProjector p;
  p.obstacle_radius = inner;
  p.outer_radius = outer;
  return p;
}

inline double leaf_volume(const dtnfem::Forest& forest) {
  double v = 0.0;
  for (int leaf : forest.leaves()) v += forest.volume(leaf);
  return v;
}

inline double root_volume(const dtnfem::Forest& forest) {
  double v = 0.0;
  for (std::size_t r = 0; r < forest.root_count(); ++r) v += forest.volume(static_cast<int>(r));
  return v;
}

inline double mesh_volume(const dtnfem::LeafMesh& mesh) {
  double v = 0.0;
  for (std::size_t s = 0; s < mesh.subtets().size(); ++s) v += mesh.subtet_volume(static_cast<int>(s));
  return v;
}

inline double boundary_area(const dtnfem::LeafMesh& mesh, BoundaryTag tag) {
  double a = 0.0;
  for (std::size_t f = 0; f < mesh.faces().size(); ++f)
    if (mesh.faces()[f].is_boundary() && mesh.faces()[f].tag == tag) a += mesh.face_area(static_cast<int>(f));
  return a;
}

// Barycentric coordinates of x in the tetrahedron p.
inline std::array<double, 4> barycentric(const std::array<Vec3, 4>& p, const Vec3& x) {
  Eigen::Matrix3d m;
  m.col(0) = p[1] - p[0];
  m.col(1) = p[2] - p[0];
  m.col(2) = p[3] - p[0];
  const Vec3 l = m.colPivHouseholderQr().solve(x - p[0]);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

inline std::array<Vec3, 4> subtet_points(const dtnfem::LeafMesh& mesh, int s) {
  std::array<Vec3, 4> p;
  for (int a = 0; a < 4; ++a)
    p[static_cast<std::size_t>(a)] = mesh.vertices()[static_cast<std::size_t>(mesh.subtets()[static_cast<std::size_t>(s)].v[static_cast<std::size_t>(a)])];
  return p;
}

// Random point of the simplex with the given number of vertices.
template <std::size_t K>
std::array<double, K> random_barycentric(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::array<double, K> l{};
  double sum = 0.0;
  for (auto& x : l) sum += (x = e(rng));
  for (auto& x : l) x /= sum;
  return l;
}

// Leaves that share a face with the given leaf (same level, uniform mesh).
inline std::vector<int> face_neighbours(const dtnfem::Forest& forest, int leaf) {
  std::vector<int> out;
  const auto& a = forest.node(leaf).vertex_ids;
  for (int other : forest.leaves()) {
    if (other == leaf) continue;
    int shared = 0;
    for (int v : forest.node(other).vertex_ids)
      for (int w : a) shared += v == w;
    if (shared == 3) out.push_back(other);
  }
  return out;
}

inline bool touches_boundary(const dtnfem::HgtNode& n) {
  for (auto t : n.face_tags)
    if (t != BoundaryTag::None) return true;
  return false;
}

}  // namespace testing
