#include "cyclematch/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <utility>

#include "cyclematch/error.hpp"

namespace cyclematch {

double FieldMatrix::max_entry() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

GeodesicField geodesic_all_pairs(int n, const std::vector<std::array<int, 2>>& edges, const std::vector<double>& lengths) {
  if (edges.size() != lengths.size()) throw DimensionError("edge and length counts differ");
  // CSR adjacency
  std::vector<int> offset(n + 1, 0);
  for (const auto& e : edges) {
    if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n) throw ParameterError("edge endpoint out of range");
    ++offset[e[0] + 1];
    ++offset[e[1] + 1];
  }
  for (int i = 0; i < n; ++i) offset[i + 1] += offset[i];
  std::vector<int> target(offset.back());
  std::vector<double> weight(offset.back());
  std::vector<int> fill(offset.begin(), offset.end() - 1);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = edges[k];
    if (!(lengths[k] >= 0.0)) throw ParameterError("edge lengths must be non-negative");
    target[fill[a]] = b;
    weight[fill[a]++] = lengths[k];
    target[fill[b]] = a;
    weight[fill[b]++] = lengths[k];
  }

  GeodesicField geo{FieldMatrix(n, std::numeric_limits<double>::infinity()), 0.0};
  using Item = std::pair<double, int>;
  for (int src = 0; src < n; ++src) {
    double* dist = geo.dist.row(src);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (int e = offset[u]; e < offset[u + 1]; ++e) {
        const double nd = d + weight[e];
        if (nd < dist[target[e]]) {
          dist[target[e]] = nd;
          heap.emplace(nd, target[e]);
        }
      }
    }
  }
  // Symmetrize exactly: the two Dijkstra runs may round differently.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::min(geo.dist(i, j), geo.dist(j, i));
      if (!std::isfinite(d)) throw TopologyError("graph is disconnected");
      geo.dist(i, j) = geo.dist(j, i) = d;
    }
  }
  geo.diameter = geo.dist.max_entry();
  return geo;
}

GeodesicField geodesic_all_pairs(const Mesh& mesh) {
  auto edges = mesh_edges(mesh);
  std::vector<double> lengths;
  lengths.reserve(edges.size());
  for (const auto& [a, b] : edges) lengths.push_back((mesh.vertices[a] - mesh.vertices[b]).norm());
  return geodesic_all_pairs(mesh.num_vertices(), edges, lengths);
}

KernelField gaussian_field(const GeodesicField& geo, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("gaussian bandwidth rho must be positive");
  const int n = geo.size();
  KernelField kf{FieldMatrix(n), rho};
  const double scale = 1.0 / (rho * std::sqrt(2.0 * std::numbers::pi));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double r = geo.dist(i, j) / rho;
      kf.values(i, j) = scale * std::exp(-0.5 * r * r);
    }
  }
  return kf;
}

}  // namespace cyclematch
