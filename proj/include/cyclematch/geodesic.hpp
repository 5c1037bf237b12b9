#pragma once

#include <cstddef>
#include <vector>

#include "cyclematch/mesh.hpp"

namespace cyclematch {

// Dense row-major n x n matrix of pairwise values on one shape.
class FieldMatrix {
public:
  FieldMatrix() = default;
  explicit FieldMatrix(int n, double fill = 0.0) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

  int size() const { return n_; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * n_; }
  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * n_; }
  double max_entry() const;

private:
  int n_ = 0;
  std::vector<double> data_;
};

struct GeodesicField {
  FieldMatrix dist;
  double diameter = 0.0;

  int size() const { return dist.size(); }
};

// Gaussian-filtered geodesics.
struct KernelField {
  FieldMatrix values;
  double rho = 0.0;

  int size() const { return values.size(); }
};

/// Graph shortest paths over the mesh edges with Euclidean edge lengths,
/// one Dijkstra per source. An approximation of surface geodesics.
GeodesicField geodesic_all_pairs(const Mesh& mesh);

/// Same, from an explicit weighted edge list (used for synthetic graphs).
GeodesicField geodesic_all_pairs(int n, const std::vector<std::array<int, 2>>& edges, const std::vector<double>& lengths);

/// values(i,j) = exp(-0.5 (d/rho)^2) / (rho sqrt(2 pi)).
KernelField gaussian_field(const GeodesicField& geo, double rho);

}  // namespace cyclematch
