#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "dtnfem/mesh.hpp"

namespace dtnfem {
namespace {

// Kuhn subdivision of the unit cube: corner (dx, dy, dz) has index
// dx + 2 dy + 4 dz; every tetrahedron follows a monotone path 000 -> 111.
std::array<std::array<int, 4>, 6> kuhn_tets() {
  std::array<std::array<int, 4>, 6> tets{};
  std::array<int, 3> axes{0, 1, 2};
  int t = 0;
  do {
    int corner = 0;
    tets[static_cast<std::size_t>(t)][0] = corner;
    for (int k = 0; k < 3; ++k) {
      corner |= 1 << axes[static_cast<std::size_t>(k)];
      tets[static_cast<std::size_t>(t)][static_cast<std::size_t>(k + 1)] = corner;
    }
    ++t;
  } while (std::next_permutation(axes.begin(), axes.end()));
  return tets;
}

void orient(const std::vector<Vec3>& x, std::array<int, 4>& t) {
  if (signed_volume(x[static_cast<std::size_t>(t[0])], x[static_cast<std::size_t>(t[1])], x[static_cast<std::size_t>(t[2])],
                    x[static_cast<std::size_t>(t[3])]) < 0.0)
    std::swap(t[2], t[3]);
}

// Tags every face that belongs to exactly one tetrahedron; `classify`
// decides the tag from the face's vertex ids.
template <class Classify>
void collect_boundary(RootMesh& mesh, Classify classify) {
  std::map<std::array<int, 3>, int> count;
  for (const auto& t : mesh.tetrahedra)
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> key{};
      int k = 0;
      for (int r = 0; r < 4; ++r)
        if (r != f) key[static_cast<std::size_t>(k++)] = t[static_cast<std::size_t>(r)];
      std::sort(key.begin(), key.end());
      ++count[key];
    }
  for (const auto& [key, n] : count)
    if (n == 1) mesh.boundary.push_back({key, classify(key)});
}

// Structured shell around a cube: cube-surface lattice points (i, j, k) in
// [0, n]^3 with one coordinate at 0 or n, radial layer l in [0, layers].
// Hexahedra are cut with Kuhn along the global (u, v, l) axes, which keeps
// the diagonals consistent across patch seams.
template <class Position>
void add_shell(RootMesh& mesh, std::map<std::array<int, 4>, int>& ids, int n, int layers, Position position) {
  auto vertex = [&](std::array<int, 4> key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(position(key));
    ids.emplace(key, id);
    return id;
  };
  const auto kuhn = kuhn_tets();
  for (int axis = 0; axis < 3; ++axis) {
    const int u_axis = axis == 0 ? 1 : 0;
    const int v_axis = axis == 2 ? 1 : 2;
    for (int side : {0, n}) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < layers; ++l) {
            std::array<int, 8> corner{};
            for (int c = 0; c < 8; ++c) {
              std::array<int, 4> key{};
              key[static_cast<std::size_t>(axis)] = side;
              key[static_cast<std::size_t>(u_axis)] = i + (c & 1);
              key[static_cast<std::size_t>(v_axis)] = j + ((c >> 1) & 1);
              key[3] = l + ((c >> 2) & 1);
              corner[static_cast<std::size_t>(c)] = vertex(key);
            }
            for (const auto& t : kuhn) {
              std::array<int, 4> tet{};
              for (int r = 0; r < 4; ++r) tet[static_cast<std::size_t>(r)] = corner[static_cast<std::size_t>(t[static_cast<std::size_t>(r)])];
              orient(mesh.vertices, tet);
              mesh.tetrahedra.push_back(tet);
            }
          }
    }
  }
}

}  // namespace

RootMesh generate_shell_mesh(double inner_radius, double outer_radius, int resolution) {
  if (!(inner_radius > 0.0) || !(outer_radius > inner_radius) || !std::isfinite(outer_radius))
    throw DomainError("shell radii must satisfy 0 < inner < outer");
  if (resolution < 1) throw DomainError("shell resolution must be at least 1");

  const int n = resolution;
  RootMesh mesh;
  std::map<std::array<int, 4>, int> ids;
  add_shell(mesh, ids, n, n, [&](const std::array<int, 4>& key) {
    // equiangular cube-sphere direction
    Vec3 d;
    for (int c = 0; c < 3; ++c) {
      const int k = key[static_cast<std::size_t>(c)];
      d[c] = (k == 0 || k == n) ? (k == 0 ? -1.0 : 1.0) : std::tan(0.25 * kPi * (2.0 * k / n - 1.0));
    }
    const double r = inner_radius + (outer_radius - inner_radius) * key[3] / n;
    if (key[3] == 0) return Vec3(d * (inner_radius / d.norm()));
    if (key[3] == n) return Vec3(d * (outer_radius / d.norm()));
    return Vec3(d * (r / d.norm()));
  });

  std::vector<int> layer(mesh.vertices.size());
  for (const auto& [key, id] : ids) layer[static_cast<std::size_t>(id)] = key[3];
  collect_boundary(mesh, [&](const std::array<int, 3>& f) {
    return layer[static_cast<std::size_t>(f[0])] == 0 ? BoundaryTag::Obstacle : BoundaryTag::Outer;
  });
  return mesh;
}

RootMesh generate_u_channel_mesh(const UChannelParams& p) {
  const double h = 0.5 * p.block;
  auto cells = [&](double length, const char* what) {
    const double q = length / p.spacing;
    const int n = static_cast<int>(std::lround(q));
    if (n < 1 || std::abs(q - n) > 1e-9)
      throw DomainError(std::string(what) + " must be a positive multiple of the lattice spacing");
    return n;
  };
  const int n = cells(p.block, "block size");
  const int slot_cells = cells(p.slot_width, "slot width");
  const int depth_cells = cells(p.slot_depth, "slot depth");
  if ((n - slot_cells) % 2 != 0 || slot_cells >= n || depth_cells >= n)
    throw DomainError("slot must be centred and strictly inside the block");
  if (!(p.outer_radius > std::sqrt(3.0) * h)) throw DomainError("outer sphere must enclose the block");
  if (p.radial_layers < 1) throw DomainError("need at least one radial layer");

  const int slot_lo = (n - slot_cells) / 2, slot_hi = slot_lo + slot_cells;
  const int depth_lo = n - depth_cells;

  RootMesh mesh;
  std::map<std::array<int, 4>, int> ids;
  auto cube_point = [&](const std::array<int, 4>& key) {
    return Vec3(-h + key[0] * p.spacing, -h + key[1] * p.spacing, -h + key[2] * p.spacing);
  };
  add_shell(mesh, ids, n, p.radial_layers, [&](const std::array<int, 4>& key) {
    const Vec3 c = cube_point(key);
    const Vec3 s = c * (p.outer_radius / c.norm());
    if (key[3] == p.radial_layers) return s;
    const double t = static_cast<double>(key[3]) / p.radial_layers;
    return Vec3((1.0 - t) * c + t * s);
  });

  // slot cells belong to the computational domain
  const auto kuhn = kuhn_tets();
  for (int i = slot_lo; i < slot_hi; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = depth_lo; k < n; ++k) {
        std::array<int, 8> corner{};
        for (int c = 0; c < 8; ++c) {
          const std::array<int, 4> key{i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1), 0};
          auto it = ids.find(key);
          if (it == ids.end()) {
            const int id = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(cube_point(key));
            it = ids.emplace(key, id).first;
          }
          corner[static_cast<std::size_t>(c)] = it->second;
        }
        for (const auto& t : kuhn) {
          std::array<int, 4> tet{};
          for (int r = 0; r < 4; ++r) tet[static_cast<std::size_t>(r)] = corner[static_cast<std::size_t>(t[static_cast<std::size_t>(r)])];
          orient(mesh.vertices, tet);
          mesh.tetrahedra.push_back(tet);
        }
      }

  std::vector<int> layer(mesh.vertices.size());
  for (const auto& [key, id] : ids) layer[static_cast<std::size_t>(id)] = key[3];
  collect_boundary(mesh, [&](const std::array<int, 3>& f) {
    const bool outer = layer[static_cast<std::size_t>(f[0])] == p.radial_layers &&
                       layer[static_cast<std::size_t>(f[1])] == p.radial_layers &&
                       layer[static_cast<std::size_t>(f[2])] == p.radial_layers;
    return outer ? BoundaryTag::Outer : BoundaryTag::Obstacle;
  });
  return mesh;
}

}  // namespace dtnfem
