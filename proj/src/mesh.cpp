#include "dtnfem/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace dtnfem {
namespace {

constexpr std::array<std::array<int, 2>, 6> kEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

unsigned bit(int i) { return 1u << static_cast<unsigned>(i); }

// Sign of det of the barycentric matrix whose rows are the masks' points
// (each mask is the uniform average of its parent vertices).
double barycentric_det(const std::array<unsigned, 4>& masks) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int r = 0; r < 4; ++r) {
    const int count = std::popcount(masks[static_cast<std::size_t>(r)]);
    for (int c = 0; c < 4; ++c)
      if (masks[static_cast<std::size_t>(r)] & bit(c)) m(r, c) = 1.0 / count;
  }
  return m.determinant();
}

std::array<BoundaryTag, 4> inherited_tags(const std::array<unsigned, 4>& masks,
                                          const std::array<BoundaryTag, 4>& parent_tags) {
  std::array<BoundaryTag, 4> tags{};
  for (int s = 0; s < 4; ++s) {
    unsigned face_union = 0;
    for (int r = 0; r < 4; ++r)
      if (r != s) face_union |= masks[static_cast<std::size_t>(r)];
    tags[static_cast<std::size_t>(s)] = BoundaryTag::None;
    for (int k = 0; k < 4; ++k)
      if (!(face_union & bit(k))) tags[static_cast<std::size_t>(s)] = parent_tags[static_cast<std::size_t>(k)];
  }
  return tags;
}

struct LocalTet {
  std::array<unsigned, 4> masks;
};

// The eight children of a 1:8 subdivision; `diagonal` selects the interior
// octahedron diagonal (0: m01-m23, 1: m02-m13, 2: m03-m12).
std::array<LocalTet, 8> red_children(int diagonal) {
  std::array<LocalTet, 8> out{};
  for (int i = 0; i < 4; ++i) {
    for (int r = 0; r < 4; ++r)
      out[static_cast<std::size_t>(i)].masks[static_cast<std::size_t>(r)] = r == i ? bit(i) : (bit(i) | bit(r));
  }
  static constexpr std::array<std::array<unsigned, 2>, 3> kDiagonals{{{0b0011, 0b1100}, {0b0101, 0b1010}, {0b1001, 0b0110}}};
  const unsigned p = kDiagonals[static_cast<std::size_t>(diagonal)][0];
  const unsigned q = kDiagonals[static_cast<std::size_t>(diagonal)][1];
  std::vector<unsigned> ring;
  for (unsigned m : {0b0011u, 0b0101u, 0b1001u, 0b0110u, 0b1010u, 0b1100u})
    if (m != p && m != q) ring.push_back(m);
  // order the equator so consecutive midpoints share a parent vertex
  std::array<unsigned, 4> cycle{ring[0], 0, 0, 0};
  std::vector<bool> used(4, false);
  used[0] = true;
  for (int k = 1; k < 4; ++k) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (!used[c] && (ring[c] & cycle[static_cast<std::size_t>(k - 1)])) {
        cycle[static_cast<std::size_t>(k)] = ring[c];
        used[c] = true;
        break;
      }
    }
  }
  for (int k = 0; k < 4; ++k)
    out[static_cast<std::size_t>(4 + k)].masks = {p, q, cycle[static_cast<std::size_t>(k)], cycle[static_cast<std::size_t>((k + 1) % 4)]};
  for (auto& t : out)
    if (barycentric_det(t.masks) < 0.0) std::swap(t.masks[2], t.masks[3]);
  return out;
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::None: return "none";
    case BoundaryTag::Obstacle: return "obstacle";
    case BoundaryTag::Outer: return "outer";
  }
  return "?";
}

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Tetrahedron: return "tetrahedron";
    case CellKind::Twin: return "twin";
    case CellKind::Four: return "four";
  }
  return "?";
}

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

bool SurfaceProjector::projects(BoundaryTag tag) const {
  return (tag == BoundaryTag::Obstacle && obstacle_radius) || (tag == BoundaryTag::Outer && outer_radius);
}

Vec3 SurfaceProjector::project(BoundaryTag tag, const Vec3& x) const {
  const double r = x.norm();
  if (tag == BoundaryTag::Obstacle && obstacle_radius) return x * (*obstacle_radius / r);
  if (tag == BoundaryTag::Outer && outer_radius) return x * (*outer_radius / r);
  return x;
}

// ---------------------------------------------------------------- LeafMesh

LeafMesh::LeafMesh(std::vector<Vec3> vertices, std::vector<LeafCell> cells, std::vector<SubTet> subtets)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), subtets_(std::move(subtets)) {
  struct Entry {
    std::array<int, 3> key;
    int subtet;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(subtets_.size() * 4);
  for (std::size_t s = 0; s < subtets_.size(); ++s) {
    const auto& v = subtets_[s].v;
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> key{};
      int k = 0;
      for (int r = 0; r < 4; ++r)
        if (r != f) key[static_cast<std::size_t>(k++)] = v[static_cast<std::size_t>(r)];
      std::sort(key.begin(), key.end());
      entries.push_back({key, static_cast<int>(s), f});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.subtet < b.subtet;
  });

  subtet_faces_.assign(subtets_.size(), {-1, -1, -1, -1});
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    MeshFace face;
    const auto& first = entries[i];
    const auto& sv = subtets_[static_cast<std::size_t>(first.subtet)].v;
    int k = 0;
    for (int r = 0; r < 4; ++r)
      if (r != first.local) face.v[static_cast<std::size_t>(k++)] = sv[static_cast<std::size_t>(r)];
    const int id = static_cast<int>(faces_.size());
    for (std::size_t e = i; e < j; ++e) {
      const std::size_t slot = e - i;
      if (slot < 2) {
        face.subtet[slot] = entries[e].subtet;
        face.local[slot] = entries[e].local;
      }
      subtet_faces_[static_cast<std::size_t>(entries[e].subtet)][static_cast<std::size_t>(entries[e].local)] = id;
    }
    if (j - i == 1)
      face.tag = subtets_[static_cast<std::size_t>(first.subtet)].tags[static_cast<std::size_t>(first.local)];
    if (j - i > 2) face.tag = BoundaryTag::None, face.subtet[1] = -2;  // flagged by validate()
    faces_.push_back(face);
    i = j;
  }

  std::vector<char> used(vertices_.size(), 0);
  for (const auto& s : subtets_)
    for (int v : s.v) used[static_cast<std::size_t>(v)] = 1;
  for (std::size_t v = 0; v < used.size(); ++v)
    if (used[v]) active_vertices_.push_back(static_cast<int>(v));
}

std::size_t LeafMesh::transitional_count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const LeafCell& c) {
    return c.kind != CellKind::Tetrahedron;
  }));
}

double LeafMesh::subtet_volume(int s) const {
  const auto& v = subtets_[static_cast<std::size_t>(s)].v;
  return signed_volume(vertices_[static_cast<std::size_t>(v[0])], vertices_[static_cast<std::size_t>(v[1])],
                       vertices_[static_cast<std::size_t>(v[2])], vertices_[static_cast<std::size_t>(v[3])]);
}

double LeafMesh::subtet_diameter(int s) const {
  const auto& v = subtets_[static_cast<std::size_t>(s)].v;
  double h = 0.0;
  for (const auto& e : kEdges)
    h = std::max(h, (vertices_[static_cast<std::size_t>(v[static_cast<std::size_t>(e[0])])] -
                     vertices_[static_cast<std::size_t>(v[static_cast<std::size_t>(e[1])])]).norm());
  return h;
}

double LeafMesh::cell_diameter(int c) const {
  const auto& cell = cells_[static_cast<std::size_t>(c)];
  double h = 0.0;
  for (int s = cell.first_subtet; s < cell.first_subtet + cell.subtet_count; ++s) h = std::max(h, subtet_diameter(s));
  return h;
}

double LeafMesh::face_area(int f) const {
  const auto& v = faces_[static_cast<std::size_t>(f)].v;
  const Vec3& a = vertices_[static_cast<std::size_t>(v[0])];
  return 0.5 * (vertices_[static_cast<std::size_t>(v[1])] - a).cross(vertices_[static_cast<std::size_t>(v[2])] - a).norm();
}

double LeafMesh::face_diameter(int f) const {
  const auto& v = faces_[static_cast<std::size_t>(f)].v;
  double h = 0.0;
  for (int i = 0; i < 3; ++i)
    h = std::max(h, (vertices_[static_cast<std::size_t>(v[static_cast<std::size_t>(i)])] -
                     vertices_[static_cast<std::size_t>(v[static_cast<std::size_t>((i + 1) % 3)])]).norm());
  return h;
}

Vec3 LeafMesh::outward_normal(int s, int local) const {
  const auto& v = subtets_[static_cast<std::size_t>(s)].v;
  std::array<Vec3, 3> p;
  int k = 0;
  for (int r = 0; r < 4; ++r)
    if (r != local) p[static_cast<std::size_t>(k++)] = vertices_[static_cast<std::size_t>(v[static_cast<std::size_t>(r)])];
  Vec3 n = (p[1] - p[0]).cross(p[2] - p[0]).normalized();
  if (n.dot(vertices_[static_cast<std::size_t>(v[static_cast<std::size_t>(local)])] - p[0]) > 0.0) n = -n;
  return n;
}

std::array<Vec3, 4> LeafMesh::barycentric_gradients(int s) const {
  const auto& v = subtets_[static_cast<std::size_t>(s)].v;
  const Vec3& x0 = vertices_[static_cast<std::size_t>(v[0])];
  Eigen::Matrix3d jac;
  jac.col(0) = vertices_[static_cast<std::size_t>(v[1])] - x0;
  jac.col(1) = vertices_[static_cast<std::size_t>(v[2])] - x0;
  jac.col(2) = vertices_[static_cast<std::size_t>(v[3])] - x0;
  const Eigen::Matrix3d inv = jac.inverse();
  std::array<Vec3, 4> g;
  g[1] = inv.row(0).transpose();
  g[2] = inv.row(1).transpose();
  g[3] = inv.row(2).transpose();
  g[0] = -(g[1] + g[2] + g[3]);
  return g;
}

std::vector<std::string> LeafMesh::validate() const {
  std::vector<std::string> problems;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    if (face.subtet[1] == -2)
      problems.push_back("face " + std::to_string(f) + " is shared by more than two sub-tetrahedra");
    else if (face.is_boundary() && face.tag == BoundaryTag::None)
      problems.push_back("face " + std::to_string(f) + " (" + std::to_string(face.v[0]) + "," +
                         std::to_string(face.v[1]) + "," + std::to_string(face.v[2]) +
                         ") has no neighbour and no boundary tag");
  }
  for (std::size_t s = 0; s < subtets_.size(); ++s)
    if (!(subtet_volume(static_cast<int>(s)) > 0.0))
      problems.push_back("sub-tetrahedron " + std::to_string(s) + " of cell " +
                         std::to_string(subtets_[s].cell) + " has non-positive volume");
  return problems;
}

// ------------------------------------------------------------------ Forest

std::uint64_t Forest::edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

Forest::Forest(const RootMesh& root, SurfaceProjector projector)
    : vertices_(root.vertices), projector_(projector) {
  origins_.resize(vertices_.size());
  std::map<std::array<int, 3>, BoundaryTag> boundary;
  for (const auto& tri : root.boundary) {
    auto key = tri.v;
    std::sort(key.begin(), key.end());
    boundary[key] = tri.tag;
  }
  std::size_t matched = 0;
  nodes_.reserve(root.tetrahedra.size());
  for (std::size_t t = 0; t < root.tetrahedra.size(); ++t) {
    HgtNode n;
    n.vertex_ids = root.tetrahedra[t];
    for (int v : n.vertex_ids)
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
        throw DomainError("tetrahedron " + std::to_string(t) + " references a missing vertex");
    if (volume_of_ids(n.vertex_ids) < 0.0) std::swap(n.vertex_ids[2], n.vertex_ids[3]);
    if (!(volume_of_ids(n.vertex_ids) > 0.0))
      throw DomainError("tetrahedron " + std::to_string(t) + " is degenerate");
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> key{};
      int k = 0;
      for (int r = 0; r < 4; ++r)
        if (r != f) key[static_cast<std::size_t>(k++)] = n.vertex_ids[static_cast<std::size_t>(r)];
      std::sort(key.begin(), key.end());
      auto it = boundary.find(key);
      if (it != boundary.end()) {
        n.face_tags[static_cast<std::size_t>(f)] = it->second;
        ++matched;
        for (int a = 0; a < 3; ++a)
          tag_edge(key[static_cast<std::size_t>(a)], key[static_cast<std::size_t>((a + 1) % 3)], it->second);
      }
    }
    nodes_.push_back(n);
  }
  if (matched < boundary.size())
    throw DomainError("boundary triangle does not match any tetrahedron face");
  root_count_ = nodes_.size();
}

double Forest::volume_of_ids(const std::array<int, 4>& v) const {
  return signed_volume(vertices_[static_cast<std::size_t>(v[0])], vertices_[static_cast<std::size_t>(v[1])],
                       vertices_[static_cast<std::size_t>(v[2])], vertices_[static_cast<std::size_t>(v[3])]);
}

double Forest::volume(int node) const { return volume_of_ids(nodes_[static_cast<std::size_t>(node)].vertex_ids); }

std::vector<int> Forest::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_leaf()) out.push_back(static_cast<int>(i));
  return out;
}

std::optional<int> Forest::midpoint(int a, int b) const {
  auto it = edges_.find(edge_key(a, b));
  if (it == edges_.end() || it->second.midpoint < 0) return std::nullopt;
  return it->second.midpoint;
}

void Forest::tag_edge(int a, int b, BoundaryTag tag) {
  if (tag == BoundaryTag::None) return;
  auto& info = edges_[edge_key(a, b)];
  if (info.tag == BoundaryTag::None) info.tag = tag;
}

int Forest::split_edge(int a, int b) {
  auto& slot = edges_[edge_key(a, b)];
  if (slot.midpoint >= 0) return slot.midpoint;
  const BoundaryTag tag = slot.tag;
  const int m = static_cast<int>(vertices_.size());
  slot.midpoint = m;
  const Vec3 mid = 0.5 * (vertices_[static_cast<std::size_t>(a)] + vertices_[static_cast<std::size_t>(b)]);
  const bool now = project_on_split_ && projector_.projects(tag);
  vertices_.push_back(now ? projector_.project(tag, mid) : mid);
  origins_.push_back({a, b, tag, now});
  if (tag != BoundaryTag::None) {
    tag_edge(a, m, tag);
    tag_edge(m, b, tag);
    if (!now && projector_.projects(tag)) pending_.push_back({m, a, b, tag});
  }
  return m;
}

int Forest::vertex_of_mask(const HgtNode& n, unsigned mask) const {
  std::array<int, 2> idx{};
  int k = 0;
  for (int i = 0; i < 4; ++i)
    if (mask & bit(i)) idx[static_cast<std::size_t>(k++)] = i;
  if (k == 1) return n.vertex_ids[static_cast<std::size_t>(idx[0])];
  auto m = midpoint(n.vertex_ids[static_cast<std::size_t>(idx[0])], n.vertex_ids[static_cast<std::size_t>(idx[1])]);
  if (!m) throw std::logic_error("closure references an unsplit edge");
  return *m;
}

int Forest::subdivide(int id) {
  if (!nodes_[static_cast<std::size_t>(id)].is_leaf())
    throw DomainError("node " + std::to_string(id) + " is not a leaf");
  const HgtNode parent = nodes_[static_cast<std::size_t>(id)];
  for (const auto& e : kEdges)
    split_edge(parent.vertex_ids[static_cast<std::size_t>(e[0])], parent.vertex_ids[static_cast<std::size_t>(e[1])]);

  // shortest interior diagonal
  static constexpr std::array<std::array<int, 4>, 3> kDiagonalEnds{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
  int best = 0;
  double best_len = 0.0;
  for (int d = 0; d < 3; ++d) {
    const auto& e = kDiagonalEnds[static_cast<std::size_t>(d)];
    const Vec3 p = vertices_[static_cast<std::size_t>(vertex_of_mask(parent, bit(e[0]) | bit(e[1])))];
    const Vec3 q = vertices_[static_cast<std::size_t>(vertex_of_mask(parent, bit(e[2]) | bit(e[3])))];
    const double len = (p - q).norm();
    if (d == 0 || len < best_len) best = d, best_len = len;
  }

  const int first = static_cast<int>(nodes_.size());
  for (const auto& local : red_children(best)) {
    HgtNode child;
    for (int r = 0; r < 4; ++r)
      child.vertex_ids[static_cast<std::size_t>(r)] = vertex_of_mask(parent, local.masks[static_cast<std::size_t>(r)]);
    child.face_tags = inherited_tags(local.masks, parent.face_tags);
    child.parent = id;
    child.level = parent.level + 1;
    for (int f = 0; f < 4; ++f) {
      const BoundaryTag tag = child.face_tags[static_cast<std::size_t>(f)];
      if (tag == BoundaryTag::None) continue;
      std::array<int, 3> fv{};
      int k = 0;
      for (int r = 0; r < 4; ++r)
        if (r != f) fv[static_cast<std::size_t>(k++)] = child.vertex_ids[static_cast<std::size_t>(r)];
      for (int a = 0; a < 3; ++a) tag_edge(fv[static_cast<std::size_t>(a)], fv[static_cast<std::size_t>((a + 1) % 3)], tag);
    }
    nodes_.push_back(child);
  }
  nodes_[static_cast<std::size_t>(id)].first_child = first;
  return first;
}

Forest::Pattern Forest::classify(const HgtNode& n) const {
  Pattern p;
  std::array<bool, 6> split{};
  int count = 0;
  for (int e = 0; e < 6; ++e) {
    const int a = n.vertex_ids[static_cast<std::size_t>(kEdges[static_cast<std::size_t>(e)][0])];
    const int b = n.vertex_ids[static_cast<std::size_t>(kEdges[static_cast<std::size_t>(e)][1])];
    auto m = midpoint(a, b);
    if (!m) continue;
    if (midpoint(a, *m) || midpoint(*m, b)) return p;  // edge split twice
    split[static_cast<std::size_t>(e)] = true;
    ++count;
  }
  if (count == 0) {
    p.valid = true;
    return p;
  }
  if (count == 1) {
    p.valid = true;
    p.kind = CellKind::Twin;
    p.split_edge = static_cast<int>(std::find(split.begin(), split.end(), true) - split.begin());
    return p;
  }
  if (count == 2) {
    // Two split edges of one face: the face can be completed instead of
    // refining the leaf.
    for (int apex = 0; apex < 4; ++apex) {
      int in_face = 0;
      for (int e = 0; e < 6; ++e)
        if (split[static_cast<std::size_t>(e)] && kEdges[static_cast<std::size_t>(e)][0] != apex &&
            kEdges[static_cast<std::size_t>(e)][1] != apex)
          ++in_face;
      if (in_face == 2) {
        for (int e = 0; e < 6; ++e)
          if (!split[static_cast<std::size_t>(e)] && kEdges[static_cast<std::size_t>(e)][0] != apex &&
              kEdges[static_cast<std::size_t>(e)][1] != apex)
            p.complete_edge = e;
        return p;
      }
    }
    return p;
  }
  if (count != 3) return p;
  for (int apex = 0; apex < 4; ++apex) {
    bool face_pattern = true;
    for (int e = 0; e < 6; ++e) {
      const bool in_face = kEdges[static_cast<std::size_t>(e)][0] != apex && kEdges[static_cast<std::size_t>(e)][1] != apex;
      if (in_face != split[static_cast<std::size_t>(e)]) face_pattern = false;
    }
    if (!face_pattern) continue;
    std::array<int, 3> mids{};
    int k = 0;
    for (int e = 0; e < 6; ++e)
      if (split[static_cast<std::size_t>(e)])
        mids[static_cast<std::size_t>(k++)] = *midpoint(n.vertex_ids[static_cast<std::size_t>(kEdges[static_cast<std::size_t>(e)][0])],
                                                        n.vertex_ids[static_cast<std::size_t>(kEdges[static_cast<std::size_t>(e)][1])]);
    for (int a = 0; a < 3; ++a)
      if (midpoint(mids[static_cast<std::size_t>(a)], mids[static_cast<std::size_t>((a + 1) % 3)])) return p;
    p.valid = true;
    p.kind = CellKind::Four;
    p.apex = apex;
    return p;
  }
  return p;
}

void Forest::append_subtets(int id, const Pattern& p, int cell, std::vector<SubTet>& out) const {
  const HgtNode& n = nodes_[static_cast<std::size_t>(id)];
  std::vector<std::array<unsigned, 4>> locals;
  const std::array<unsigned, 4> identity{bit(0), bit(1), bit(2), bit(3)};
  switch (p.kind) {
    case CellKind::Tetrahedron:
      locals.push_back(identity);
      break;
    case CellKind::Twin: {
      const int i = kEdges[static_cast<std::size_t>(p.split_edge)][0];
      const int j = kEdges[static_cast<std::size_t>(p.split_edge)][1];
      auto a = identity, b = identity;
      a[static_cast<std::size_t>(j)] = bit(i) | bit(j);
      b[static_cast<std::size_t>(i)] = bit(i) | bit(j);
      locals = {a, b};
      break;
    }
    case CellKind::Four: {
      std::array<int, 3> face{};
      int k = 0;
      for (int r = 0; r < 4; ++r)
        if (r != p.apex) face[static_cast<std::size_t>(k++)] = r;
      for (int q : face) {
        auto t = identity;
        for (int r : face)
          if (r != q) t[static_cast<std::size_t>(r)] = bit(q) | bit(r);
        locals.push_back(t);
      }
      auto mid = identity;
      for (int r : face) mid[static_cast<std::size_t>(r)] = 0b1111u & ~bit(p.apex) & ~bit(r);
      locals.push_back(mid);
      break;
    }
  }
  for (auto masks : locals) {
    if (barycentric_det(masks) < 0.0) std::swap(masks[2], masks[3]);
    SubTet s;
    for (int r = 0; r < 4; ++r) s.v[static_cast<std::size_t>(r)] = vertex_of_mask(n, masks[static_cast<std::size_t>(r)]);
    s.tags = inherited_tags(masks, n.face_tags);
    s.cell = cell;
    out.push_back(s);
  }
}

int Forest::enforce_closure() {
  int forced = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].is_leaf()) continue;
      const Pattern p = classify(nodes_[i]);
      if (p.valid) continue;
      if (p.complete_edge >= 0) {
        const auto& e = kEdges[static_cast<std::size_t>(p.complete_edge)];
        split_edge(nodes_[i].vertex_ids[static_cast<std::size_t>(e[0])], nodes_[i].vertex_ids[static_cast<std::size_t>(e[1])]);
        changed = true;
        continue;
      }
      subdivide(static_cast<int>(i));
      ++forced;
      changed = true;
    }
  }
  return forced;
}

LeafMesh Forest::build_closure() {
  enforce_closure();
  return leaf_mesh();
}

LeafMesh Forest::leaf_mesh() const {
  std::vector<LeafCell> cells;
  std::vector<SubTet> subtets;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.is_leaf()) continue;
    const Pattern p = classify(n);
    if (!p.valid) throw std::logic_error("leaf " + std::to_string(i) + " has no valid closure; run enforce_closure()");
    LeafCell cell;
    cell.node = static_cast<int>(i);
    cell.level = n.level;
    cell.kind = p.kind;
    cell.first_subtet = static_cast<int>(subtets.size());
    append_subtets(static_cast<int>(i), p, static_cast<int>(cells.size()), subtets);
    cell.subtet_count = static_cast<int>(subtets.size()) - cell.first_subtet;
    for (int s = cell.first_subtet; s < static_cast<int>(subtets.size()); ++s)
      for (int v : subtets[static_cast<std::size_t>(s)].v)
        if (std::find(cell.vertices.begin(), cell.vertices.end(), v) == cell.vertices.end()) cell.vertices.push_back(v);
    cells.push_back(std::move(cell));
  }
  return LeafMesh(vertices_, std::move(cells), std::move(subtets));
}

void Forest::recompute_positions(int first) {
  for (std::size_t v = static_cast<std::size_t>(std::max(first, 0)); v < vertices_.size(); ++v) {
    const auto& o = origins_[v];
    if (o.a < 0) continue;
    const Vec3 mid = 0.5 * (vertices_[static_cast<std::size_t>(o.a)] + vertices_[static_cast<std::size_t>(o.b)]);
    vertices_[v] = o.projected ? projector_.project(o.tag, mid) : mid;
  }
}

std::vector<std::string> Forest::repair_inversions() {
  std::vector<std::string> warnings;
  std::vector<SubTet> subtets;
  for (;;) {
    int first = -1, unresolved = -1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (!n.is_leaf()) continue;
      Pattern p = classify(n);
      if (!p.valid) p = Pattern{true, CellKind::Tetrahedron, -1, -1};
      subtets.clear();
      append_subtets(static_cast<int>(i), p, 0, subtets);
      for (const auto& s : subtets) {
        if (volume_of_ids(s.v) > 0.0) continue;
        // The culprit may sit further up: a curved vertex of an ancestor
        // moves every midpoint derived from it.
        int newest = -1;
        std::vector<int> stack(s.v.begin(), s.v.end());
        while (!stack.empty()) {
          const int v = stack.back();
          stack.pop_back();
          const auto& o = origins_[static_cast<std::size_t>(v)];
          if (o.projected) newest = std::max(newest, v);
          if (o.a >= 0 && !o.projected) {
            stack.push_back(o.a);
            stack.push_back(o.b);
          }
        }
        if (newest < 0) {
          unresolved = static_cast<int>(i);  // may be a vertex rolled back earlier in this pass
          break;
        }
        origins_[static_cast<std::size_t>(newest)].projected = false;
        first = first < 0 ? newest : std::min(first, newest);
        warnings.push_back("projection of vertex " + std::to_string(newest) +
                           " rolled back: it inverted a tetrahedron of leaf " + std::to_string(i));
        break;
      }
    }
    if (first < 0) {
      if (unresolved >= 0) throw std::logic_error("leaf " + std::to_string(unresolved) + " is inverted without curved vertices");
      return warnings;
    }
    recompute_positions(first);
  }
}

std::vector<std::string> Forest::project_boundary_midpoints(const SurfaceProjector& projector) {
  projector_ = projector;
  int first = -1;
  for (const auto& p : pending_) {
    if (!projector_.projects(p.tag)) continue;
    origins_[static_cast<std::size_t>(p.vertex)].projected = true;
    first = first < 0 ? p.vertex : std::min(first, p.vertex);
  }
  pending_.clear();
  if (first >= 0) recompute_positions(first);
  return repair_inversions();
}

RefineReport Forest::refine(std::span<const int> marked) {
  RefineReport report;
  std::unordered_set<int> marked_set;
  for (int id : marked) {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size() || !nodes_[static_cast<std::size_t>(id)].is_leaf())
      throw DomainError("marked id " + std::to_string(id) + " is not a leaf");
    marked_set.insert(id);
  }

  // boundary edge -> leaves owning a curved boundary face containing it
  std::unordered_map<std::uint64_t, std::vector<int>> boundary_edges;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.is_leaf()) continue;
    for (int f = 0; f < 4; ++f) {
      if (!projector_.projects(n.face_tags[static_cast<std::size_t>(f)])) continue;
      for (const auto& e : kEdges) {
        if (e[0] == f || e[1] == f) continue;
        boundary_edges[edge_key(n.vertex_ids[static_cast<std::size_t>(e[0])], n.vertex_ids[static_cast<std::size_t>(e[1])])]
            .push_back(static_cast<int>(i));
      }
    }
  }
  auto boundary_neighbours = [&](int id) {
    std::vector<std::pair<int, bool>> out;  // (neighbour, edge already split)
    const auto& n = nodes_[static_cast<std::size_t>(id)];
    for (int f = 0; f < 4; ++f) {
      if (!projector_.projects(n.face_tags[static_cast<std::size_t>(f)])) continue;
      for (const auto& e : kEdges) {
        if (e[0] == f || e[1] == f) continue;
        const int a = n.vertex_ids[static_cast<std::size_t>(e[0])], b = n.vertex_ids[static_cast<std::size_t>(e[1])];
        const bool split = midpoint(a, b).has_value();
        auto it = boundary_edges.find(edge_key(a, b));
        if (it == boundary_edges.end()) continue;
        for (int other : it->second)
          if (other != id) out.emplace_back(other, split);
      }
    }
    return out;
  };

  std::unordered_set<int> grouped;
  for (int id : deferred_) {
    if (!nodes_[static_cast<std::size_t>(id)].is_leaf()) continue;
    grouped.insert(id);
    for (auto [other, split] : boundary_neighbours(id))
      if (!split) grouped.insert(other);
  }

  std::vector<int> to_refine(grouped.begin(), grouped.end());
  std::vector<int> deferred;
  std::vector<int> sorted_marked(marked_set.begin(), marked_set.end());
  std::sort(sorted_marked.begin(), sorted_marked.end());
  for (int id : sorted_marked) {
    if (grouped.count(id)) continue;
    bool ready = true;
    for (auto [other, split] : boundary_neighbours(id)) {
      if (split) continue;
      if (marked_set.count(other) || grouped.count(other)) continue;
      if (nodes_[static_cast<std::size_t>(other)].level > nodes_[static_cast<std::size_t>(id)].level) continue;
      ready = false;
    }
    if (ready)
      to_refine.push_back(id);
    else
      deferred.push_back(id);
  }
  std::sort(to_refine.begin(), to_refine.end());
  to_refine.erase(std::unique(to_refine.begin(), to_refine.end()), to_refine.end());

  // Midpoints are curved as soon as they exist, so every later midpoint
  // is taken between curved vertices.
  report.warnings = project_boundary_midpoints(projector_);
  project_on_split_ = true;
  for (int id : to_refine) {
    if (!nodes_[static_cast<std::size_t>(id)].is_leaf()) continue;
    subdivide(id);
    report.refined.push_back(id);
  }
  report.forced = enforce_closure();
  project_on_split_ = false;
  const auto repaired = repair_inversions();
  report.warnings.insert(report.warnings.end(), repaired.begin(), repaired.end());

  deferred_.clear();
  for (int id : deferred)
    if (nodes_[static_cast<std::size_t>(id)].is_leaf()) deferred_.push_back(id);
  report.deferred = deferred_;
  return report;
}

}  // namespace dtnfem
