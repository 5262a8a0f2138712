#include "dtnfem/msh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace dtnfem {
namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  std::string expect(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
    return line;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("msh line " + std::to_string(number_) + ": " + msg, number_);
  }
  long number() const { return number_; }

 private:
  std::istream& in_;
  long number_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

RootMesh read_msh(std::istream& in, MshTagMap tags) {
  LineReader reader(in);
  RootMesh mesh;
  std::unordered_map<long, int> node_index;
  bool have_format = false, have_nodes = false, have_elements = false;

  std::string line;
  while (reader.next(line)) {
    const std::string section = trim(line);
    if (section == "$MeshFormat") {
      std::istringstream ss(reader.expect("format line"));
      std::string version;
      int file_type = -1, data_size = 0;
      ss >> version >> file_type >> data_size;
      if (version != "2.2" && version != "2.1" && version != "2")
        reader.fail("unsupported MSH version " + version);
      if (file_type != 0) reader.fail("binary MSH files are not supported");
      if (trim(reader.expect("$EndMeshFormat")) != "$EndMeshFormat") reader.fail("expected $EndMeshFormat");
      have_format = true;
    } else if (section == "$Nodes") {
      if (!have_format) reader.fail("$Nodes before $MeshFormat");
      long count = -1;
      std::istringstream(reader.expect("node count")) >> count;
      if (count < 0) reader.fail("invalid node count");
      mesh.vertices.reserve(static_cast<std::size_t>(count));
      for (long i = 0; i < count; ++i) {
        std::istringstream ss(reader.expect("node"));
        long id;
        double x, y, z;
        if (!(ss >> id >> x >> y >> z)) reader.fail("malformed node record");
        if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second)
          reader.fail("duplicate node id " + std::to_string(id));
        mesh.vertices.emplace_back(x, y, z);
      }
      if (trim(reader.expect("$EndNodes")) != "$EndNodes") reader.fail("expected $EndNodes");
      have_nodes = true;
    } else if (section == "$Elements") {
      if (!have_nodes) reader.fail("$Elements before $Nodes");
      long count = -1;
      std::istringstream(reader.expect("element count")) >> count;
      if (count < 0) reader.fail("invalid element count");
      for (long i = 0; i < count; ++i) {
        std::istringstream ss(reader.expect("element"));
        long id;
        int type, ntags;
        if (!(ss >> id >> type >> ntags)) reader.fail("malformed element record");
        std::vector<long> tag_values(static_cast<std::size_t>(std::max(ntags, 0)));
        for (auto& t : tag_values)
          if (!(ss >> t)) reader.fail("missing element tags");
        auto read_nodes = [&](int n) {
          std::vector<int> out;
          for (int k = 0; k < n; ++k) {
            long nid;
            if (!(ss >> nid)) reader.fail("element " + std::to_string(id) + " has too few nodes");
            auto it = node_index.find(nid);
            if (it == node_index.end()) reader.fail("element " + std::to_string(id) + " references unknown node " + std::to_string(nid));
            out.push_back(it->second);
          }
          return out;
        };
        switch (type) {
          case 4: {
            auto v = read_nodes(4);
            mesh.tetrahedra.push_back({v[0], v[1], v[2], v[3]});
            break;
          }
          case 2: {
            auto v = read_nodes(3);
            if (tag_values.empty()) reader.fail("boundary triangle " + std::to_string(id) + " has no physical tag");
            BoundaryTag tag;
            if (tag_values[0] == tags.obstacle)
              tag = BoundaryTag::Obstacle;
            else if (tag_values[0] == tags.outer)
              tag = BoundaryTag::Outer;
            else
              reader.fail("boundary triangle " + std::to_string(id) + " has unknown physical tag " +
                          std::to_string(tag_values[0]));
            mesh.boundary.push_back({{v[0], v[1], v[2]}, tag});
            break;
          }
          case 1:
          case 15:
            break;
          default:
            reader.fail("unsupported element type " + std::to_string(type));
        }
      }
      if (trim(reader.expect("$EndElements")) != "$EndElements") reader.fail("expected $EndElements");
      have_elements = true;
    } else if (!section.empty() && section[0] == '$') {
      // skip unknown sections such as $PhysicalNames
      const std::string end = "$End" + section.substr(1);
      while (trim(reader.expect(end.c_str())) != end) {
      }
    } else {
      reader.fail("unexpected content '" + section + "'");
    }
  }
  if (!have_format) reader.fail("missing $MeshFormat");
  if (!have_elements) reader.fail("missing $Elements");
  if (mesh.tetrahedra.empty()) reader.fail("no tetrahedra (type 4) found");
  return mesh;
}

RootMesh read_msh(const std::filesystem::path& path, MshTagMap tags) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  return read_msh(in, tags);
}

void write_msh(const RootMesh& mesh, const std::filesystem::path& path, MshTagMap tags) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file " + path.string());
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.vertices.size() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& x = mesh.vertices[i];
    out << i + 1 << ' ' << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
  }
  out << "$EndNodes\n$Elements\n" << mesh.boundary.size() + mesh.tetrahedra.size() << '\n';
  std::size_t id = 1;
  for (const auto& tri : mesh.boundary) {
    const int phys = tri.tag == BoundaryTag::Outer ? tags.outer : tags.obstacle;
    out << id++ << " 2 2 " << phys << ' ' << phys;
    for (int v : tri.v) out << ' ' << v + 1;
    out << '\n';
  }
  for (const auto& t : mesh.tetrahedra) {
    out << id++ << " 4 2 3 3";
    for (int v : t) out << ' ' << v + 1;
    out << '\n';
  }
  out << "$EndElements\n";
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace dtnfem
