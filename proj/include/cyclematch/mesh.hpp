#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace cyclematch {

enum class MeshFormat { Off, PlyAscii };

// Triangle mesh with isolated vertices removed. `source_index[v]` is the
// vertex's index in the file it was loaded from, so per-vertex side files
// written against the original numbering can still be attached.
struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> source_index;
  std::optional<std::vector<std::uint8_t>> side_labels;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
};

/// Builds a mesh from raw arrays: validates indices, prunes unreferenced
/// vertices (order preserved) and rejects disconnected edge graphs.
Mesh make_mesh(std::vector<Eigen::Vector3d> vertices, std::vector<std::array<int, 3>> faces);

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format);
/// Picks the format from the file extension (.off / .ply).
Mesh load_mesh(const std::filesystem::path& path);

void save_off(const Mesh& mesh, const std::filesystem::path& path);

/// Reads one 0/1 label per line. Accepts files written against either the
/// pruned or the original vertex numbering.
std::vector<std::uint8_t> load_side_labels(const std::filesystem::path& path, const Mesh& mesh);

/// Unique undirected edges (i < j), sorted.
std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh);

/// Angle-weighted vertex normals, unit length.
std::vector<Eigen::Vector3d> vertex_normals(const Mesh& mesh);

/// Displaces each vertex along its normal by a N(0, sigma2) offset.
Mesh perturb_along_normals(const Mesh& mesh, double sigma2, std::uint64_t seed);

/// Applies a vertex relabeling: vertex v of the input becomes vertex
/// new_index[v] of the output. Faces and labels follow.
Mesh relabel_vertices(const Mesh& mesh, const std::vector<int>& new_index);

}  // namespace cyclematch
