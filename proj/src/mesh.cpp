#include "cyclematch/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Geometry>

#include "cyclematch/error.hpp"
#include "cyclematch/rng.hpp"

namespace cyclematch {
namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Reads whitespace-separated tokens, skipping '#' comments.
class TokenReader {
public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    while (true) {
      if (line_ >> tok) {
        if (tok[0] == '#') {
          line_.clear();
          line_.str("");
          continue;
        }
        return true;
      }
      std::string raw;
      if (!std::getline(in_, raw)) return false;
      ++line_no_;
      line_.clear();
      line_.str(raw);
    }
  }

  std::string expect(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(std::string("unexpected end of file, expected ") + what);
    return tok;
  }

  long long expect_int(const char* what) {
    auto tok = expect(what);
    try {
      std::size_t pos = 0;
      long long v = std::stoll(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no_) + ": expected " + what + ", got '" + tok + "'");
    }
  }

  double expect_double(const char* what) {
    auto tok = expect(what);
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no_) + ": expected " + what + ", got '" + tok + "'");
    }
  }

  int line_no() const { return line_no_; }

private:
  std::istream& in_;
  std::istringstream line_;
  int line_no_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

Mesh parse_off(std::istream& in) {
  TokenReader reader(in);
  auto header = reader.expect("OFF header");
  if (header != "OFF") throw ParseError("missing OFF header, got '" + header + "'");
  long long nv = reader.expect_int("vertex count");
  long long nf = reader.expect_int("face count");
  reader.expect_int("edge count");
  if (nv < 0 || nf < 0) throw ParseError("negative element count in OFF header");

  std::vector<Eigen::Vector3d> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    v.x() = reader.expect_double("vertex x");
    v.y() = reader.expect_double("vertex y");
    v.z() = reader.expect_double("vertex z");
  }
  std::vector<std::array<int, 3>> faces(static_cast<std::size_t>(nf));
  for (auto& f : faces) {
    long long arity = reader.expect_int("face arity");
    if (arity != 3) {
      throw ParseError("line " + std::to_string(reader.line_no()) + ": only triangles are supported, got arity " +
                       std::to_string(arity));
    }
    for (auto& idx : f) idx = static_cast<int>(reader.expect_int("face index"));
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<std::string> properties;  // list properties are stored as "list:<name>"
};

Mesh parse_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") throw ParseError("missing ply magic");
  std::vector<PlyElement> elements;
  bool ascii = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = fmt == "ascii";
    } else if (kw == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      if (!ls) throw ParseError("malformed element line: " + line);
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw ParseError("property before any element");
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type, name;
        ls >> count_type >> item_type >> name;
        elements.back().properties.push_back("list:" + name);
      } else {
        std::string name;
        ls >> name;
        elements.back().properties.push_back(name);
      }
    } else if (kw == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("ply header not terminated");
  if (!ascii) throw ParseError("only ascii ply is supported");

  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  TokenReader reader(in);
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      auto index_of = [&](const std::string& n) {
        auto it = std::find(e.properties.begin(), e.properties.end(), n);
        if (it == e.properties.end()) throw ParseError("vertex element lacks property " + n);
        return static_cast<std::size_t>(it - e.properties.begin());
      };
      std::array<std::size_t, 3> xyz{index_of("x"), index_of("y"), index_of("z")};
      vertices.resize(static_cast<std::size_t>(e.count));
      std::vector<double> row(e.properties.size());
      for (auto& v : vertices) {
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          if (e.properties[p].rfind("list:", 0) == 0) throw ParseError("list properties on vertices are not supported");
          row[p] = reader.expect_double("vertex property");
        }
        v = Eigen::Vector3d(row[xyz[0]], row[xyz[1]], row[xyz[2]]);
      }
    } else if (e.name == "face") {
      faces.resize(static_cast<std::size_t>(e.count));
      for (auto& f : faces) {
        for (const auto& p : e.properties) {
          if (p == "list:vertex_indices" || p == "list:vertex_index") {
            long long arity = reader.expect_int("face arity");
            if (arity != 3) throw ParseError("only triangles are supported, got arity " + std::to_string(arity));
            for (auto& idx : f) idx = static_cast<int>(reader.expect_int("face index"));
          } else if (p.rfind("list:", 0) == 0) {
            long long len = reader.expect_int("list length");
            for (long long i = 0; i < len; ++i) reader.expect("list item");
          } else {
            reader.expect("face property");
          }
        }
      }
    } else {
      for (long long i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (p.rfind("list:", 0) == 0) {
            long long len = reader.expect_int("list length");
            for (long long j = 0; j < len; ++j) reader.expect("list item");
          } else {
            reader.expect("property");
          }
        }
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

}  // namespace

Mesh make_mesh(std::vector<Eigen::Vector3d> vertices, std::vector<std::array<int, 3>> faces) {
  const int n = static_cast<int>(vertices.size());
  std::vector<char> used(vertices.size(), 0);
  for (const auto& f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= n) {
        throw ParseError("face index " + std::to_string(idx) + " out of range [0, " + std::to_string(n) + ")");
      }
      used[idx] = 1;
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) throw ParseError("degenerate face with repeated vertex");
  }

  Mesh mesh;
  std::vector<int> remap(vertices.size(), -1);
  for (int v = 0; v < n; ++v) {
    if (!used[v]) continue;
    remap[v] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(vertices[v]);
    mesh.source_index.push_back(v);
  }
  mesh.faces.reserve(faces.size());
  for (const auto& f : faces) mesh.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});

  if (mesh.vertices.empty()) throw TopologyError("mesh has no faces");
  DisjointSets sets(mesh.num_vertices());
  for (const auto& f : mesh.faces) {
    sets.unite(f[0], f[1]);
    sets.unite(f[1], f[2]);
  }
  int components = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v) components += sets.find(v) == v;
  if (components != 1) throw TopologyError("mesh edge graph is disconnected: " + std::to_string(components) + " components");
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  auto in = open_input(path);
  try {
    return format == MeshFormat::Off ? parse_off(in) : parse_ply(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Mesh load_mesh(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return load_mesh(path, MeshFormat::Off);
  if (ext == ".ply") return load_mesh(path, MeshFormat::PlyAscii);
  throw ParseError("unknown mesh extension '" + ext + "' for " + path.string());
}

void save_off(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

std::vector<std::uint8_t> load_side_labels(const std::filesystem::path& path, const Mesh& mesh) {
  auto in = open_input(path);
  std::vector<std::uint8_t> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    int value = -1;
    ls >> value;
    if (value != 0 && value != 1) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": side label must be 0 or 1");
    }
    raw.push_back(static_cast<std::uint8_t>(value));
  }
  if (raw.size() == static_cast<std::size_t>(mesh.num_vertices())) return raw;
  const int max_source = mesh.source_index.empty() ? -1 : mesh.source_index.back();
  if (static_cast<int>(raw.size()) > max_source) {
    std::vector<std::uint8_t> labels;
    labels.reserve(mesh.vertices.size());
    for (int src : mesh.source_index) labels.push_back(raw[src]);
    return labels;
  }
  throw DimensionError(path.string() + ": " + std::to_string(raw.size()) + " labels for a mesh with " +
                       std::to_string(mesh.num_vertices()) + " vertices");
}

std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh) {
  std::vector<std::array<int, 2>> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<Eigen::Vector3d> vertex_normals(const Mesh& mesh) {
  std::vector<Eigen::Vector3d> normals(mesh.vertices.size(), Eigen::Vector3d::Zero());
  for (const auto& f : mesh.faces) {
    const Eigen::Vector3d n = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    const double len = n.norm();
    if (len == 0.0) continue;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d e1 = mesh.vertices[f[(k + 1) % 3]] - mesh.vertices[f[k]];
      const Eigen::Vector3d e2 = mesh.vertices[f[(k + 2) % 3]] - mesh.vertices[f[k]];
      const double angle = std::atan2(e1.cross(e2).norm(), e1.dot(e2));
      normals[f[k]] += angle * n / len;
    }
  }
  for (auto& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

Mesh perturb_along_normals(const Mesh& mesh, double sigma2, std::uint64_t seed) {
  if (sigma2 < 0.0) throw ParameterError("noise variance must be non-negative");
  Mesh out = mesh;
  if (sigma2 == 0.0) return out;
  const auto normals = vertex_normals(mesh);
  Rng rng(derive_seed(seed, {0x6e6f697365ULL}));
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  for (std::size_t v = 0; v < out.vertices.size(); ++v) out.vertices[v] += noise(rng) * normals[v];
  return out;
}

Mesh relabel_vertices(const Mesh& mesh, const std::vector<int>& new_index) {
  const auto n = mesh.vertices.size();
  if (new_index.size() != n) throw DimensionError("relabeling size mismatch");
  Mesh out;
  out.vertices.resize(n);
  out.source_index.resize(n);
  std::vector<char> seen(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const int t = new_index[v];
    if (t < 0 || static_cast<std::size_t>(t) >= n || seen[t]) throw ParameterError("relabeling is not a bijection");
    seen[t] = 1;
    out.vertices[t] = mesh.vertices[v];
    out.source_index[t] = mesh.source_index[v];
  }
  out.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) out.faces.push_back({new_index[f[0]], new_index[f[1]], new_index[f[2]]});
  if (mesh.side_labels) {
    std::vector<std::uint8_t> labels(n);
    for (std::size_t v = 0; v < n; ++v) labels[new_index[v]] = (*mesh.side_labels)[v];
    out.side_labels = std::move(labels);
  }
  return out;
}

}  // namespace cyclematch
