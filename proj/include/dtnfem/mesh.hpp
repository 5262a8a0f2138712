#pragma once

// Hierarchy-geometry-tree (octree) tetrahedral meshes.
//
// Every root tetrahedron owns a tree of 1:8 subdivisions; the leaves form the
// active mesh. Hanging vertices next to finer leaves are removed by
// replacing the coarse leaf with a transitional element:
//
//   twin-tetrahedron  one split edge, 5 DoFs, two sub-tetrahedra
//   four-tetrahedron  one face with all three edges split, 7 DoFs, four
//                     sub-tetrahedra sharing the apex opposite that face
//
// A leaf with two split edges on one face gets the third edge of that face
// split as well. Any other split pattern, or an edge split twice, refines
// the leaf instead, which keeps neighbours within one level of each other.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dtnfem/common.hpp"

namespace dtnfem {

enum class BoundaryTag : std::uint8_t { None = 0, Obstacle = 1, Outer = 2 };

const char* to_string(BoundaryTag tag);

/// Plain conforming tetrahedral mesh as read from disk or generated.
struct RootMesh {
  struct Triangle {
    std::array<int, 3> v;
    BoundaryTag tag;
  };
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tetrahedra;
  std::vector<Triangle> boundary;
};

/// How newly created boundary midpoints are moved onto the curved boundary.
/// An unset radius leaves that boundary polyhedral.
struct SurfaceProjector {
  std::optional<double> obstacle_radius;
  std::optional<double> outer_radius;

  bool projects(BoundaryTag tag) const;
  Vec3 project(BoundaryTag tag, const Vec3& x) const;
};

struct HgtNode {
  std::array<int, 4> vertex_ids{};
  std::array<BoundaryTag, 4> face_tags{};  // face i is opposite vertex i
  int parent = -1;
  int first_child = -1;  // children occupy first_child .. first_child + 7
  int level = 0;

  bool is_leaf() const { return first_child < 0; }
  int child_count() const { return is_leaf() ? 0 : 8; }
};

enum class CellKind : std::uint8_t { Tetrahedron, Twin, Four };

const char* to_string(CellKind kind);

struct SubTet {
  std::array<int, 4> v{};
  std::array<BoundaryTag, 4> tags{};  // face i is opposite v[i]
  int cell = -1;
};

struct LeafCell {
  int node = -1;
  int level = 0;
  CellKind kind = CellKind::Tetrahedron;
  std::vector<int> vertices;  // 4, 5 or 7 DoF points
  int first_subtet = 0;
  int subtet_count = 0;
};

struct MeshFace {
  std::array<int, 3> v{};
  std::array<int, 2> subtet{-1, -1};
  std::array<int, 2> local{-1, -1};  // local face index in each sub-tet
  BoundaryTag tag = BoundaryTag::None;

  bool is_boundary() const { return subtet[1] < 0; }
};

/// Immutable snapshot of the active conforming mesh.
class LeafMesh {
 public:
  LeafMesh(std::vector<Vec3> vertices, std::vector<LeafCell> cells, std::vector<SubTet> subtets);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<LeafCell>& cells() const { return cells_; }
  const std::vector<SubTet>& subtets() const { return subtets_; }
  const std::vector<MeshFace>& faces() const { return faces_; }
  /// Face ids of sub-tet s, indexed by local face (opposite vertex i).
  const std::array<int, 4>& subtet_faces(int s) const { return subtet_faces_[static_cast<std::size_t>(s)]; }
  /// Vertices referenced by at least one sub-tet, ascending.
  const std::vector<int>& active_vertices() const { return active_vertices_; }

  std::size_t transitional_count() const;

  double subtet_volume(int s) const;
  double subtet_diameter(int s) const;
  double cell_diameter(int c) const;
  double face_area(int f) const;
  double face_diameter(int f) const;
  /// Unit normal of local face `local` of sub-tet s, pointing out of s.
  Vec3 outward_normal(int s, int local) const;
  /// Gradients of the four barycentric functions of sub-tet s.
  std::array<Vec3, 4> barycentric_gradients(int s) const;

  /// Problems that break H1 conformity: unmatched untagged faces, faces
  /// shared by more than two sub-tets, non-positive volumes.
  std::vector<std::string> validate() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<LeafCell> cells_;
  std::vector<SubTet> subtets_;
  std::vector<MeshFace> faces_;
  std::vector<std::array<int, 4>> subtet_faces_;
  std::vector<int> active_vertices_;
};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

struct RefineReport {
  std::vector<int> refined;   // marked leaves that were subdivided
  std::vector<int> deferred;  // marked boundary leaves held back this pass
  int forced = 0;             // leaves subdivided by closure/balance
  std::vector<std::string> warnings;
};

class Forest {
 public:
  Forest(const RootMesh& root, SurfaceProjector projector);

  const std::vector<HgtNode>& nodes() const { return nodes_; }
  const HgtNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const SurfaceProjector& projector() const { return projector_; }
  std::size_t root_count() const { return root_count_; }

  std::vector<int> leaves() const;
  double volume(int node) const;

  /// Midpoint vertex of edge (a, b) if that edge has been split.
  std::optional<int> midpoint(int a, int b) const;

  /// Uniform 1:8 subdivision of a leaf. New boundary midpoints are placed at
  /// the straight midpoint and queued for project_boundary_midpoints().
  int subdivide(int node);

  /// Subdivide marked leaves, restore balance and conformity, then project
  /// new boundary midpoints. Marked leaves on a curved boundary whose
  /// boundary neighbours are neither marked nor finer are deferred; a leaf
  /// deferred by the previous call is refined together with its boundary
  /// neighbours.
  RefineReport refine(std::span<const int> marked);

  /// Refine leaves until every leaf matches a supported closure pattern.
  /// Returns the number of forced subdivisions.
  int enforce_closure();

  /// enforce_closure() followed by a snapshot of the active mesh.
  LeafMesh build_closure();

  /// Snapshot; requires a closed forest (throws otherwise).
  LeafMesh leaf_mesh() const;

  /// Move queued boundary midpoints onto the curved surfaces (the projector
  /// replaces the forest's own). Later midpoints are recomputed from the
  /// moved vertices. A projected vertex that leaves a non-positive leaf
  /// sub-tetrahedron is moved back to its chord; returns one warning per
  /// rollback. refine() projects new midpoints as they are created.
  std::vector<std::string> project_boundary_midpoints(const SurfaceProjector& projector);
  std::vector<std::string> project_boundary_midpoints() { return project_boundary_midpoints(projector_); }

  const std::vector<int>& deferred() const { return deferred_; }
  std::size_t pending_projection_count() const { return pending_.size(); }

 private:
  struct EdgeInfo {
    int midpoint = -1;
    BoundaryTag tag = BoundaryTag::None;
  };
  struct Pattern {
    bool valid = false;
    CellKind kind = CellKind::Tetrahedron;
    int split_edge = -1;  // local edge for Twin
    int apex = -1;        // local vertex opposite the split face for Four
    int complete_edge = -1;  // invalid leaf fixable by splitting this local edge
  };
  struct Pending {
    int vertex;
    int a, b;
    BoundaryTag tag;
  };

  static std::uint64_t edge_key(int a, int b);
  double volume_of_ids(const std::array<int, 4>& v) const;
  int split_edge(int a, int b);
  void tag_edge(int a, int b, BoundaryTag tag);
  Pattern classify(const HgtNode& n) const;
  void append_subtets(int node, const Pattern& p, int cell, std::vector<SubTet>& out) const;
  int vertex_of_mask(const HgtNode& n, unsigned mask) const;
  void recompute_positions(int first);
  std::vector<std::string> repair_inversions();

  std::vector<Vec3> vertices_;
  std::vector<HgtNode> nodes_;
  std::unordered_map<std::uint64_t, EdgeInfo> edges_;
  SurfaceProjector projector_;
  std::size_t root_count_ = 0;
  std::vector<int> deferred_;
  std::vector<Pending> pending_;
  struct Origin {
    int a = -1, b = -1;  // parent edge of a midpoint, -1 for root vertices
    BoundaryTag tag = BoundaryTag::None;
    bool projected = false;
  };
  std::vector<Origin> origins_;
  bool project_on_split_ = false;
};

/// Cube-sphere shell between two concentric spheres: 6 patches of k x k
/// quadrilaterals, k radial layers, 6 tetrahedra per hexahedron.
RootMesh generate_shell_mesh(double inner_radius, double outer_radius, int resolution);

/// Ball of radius `outer_radius` minus a U-shaped block: the cube
/// [-h, h]^3 (h = block/2) with a slot of width `slot_width` (along x) and
/// depth `slot_depth` cut from the top (+z) face through the full y extent.
struct UChannelParams {
  double outer_radius = 1.0;
  double block = 0.5;
  double slot_width = 0.2;
  double slot_depth = 0.35;
  double spacing = 0.05;  // lattice step inside the block region
  int radial_layers = 4;
};
RootMesh generate_u_channel_mesh(const UChannelParams& params);

}  // namespace dtnfem
