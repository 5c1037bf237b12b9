#pragma once

#include <vector>

#include <Eigen/Core>

#include "cyclematch/geodesic.hpp"
#include "cyclematch/mesh.hpp"
#include "cyclematch/permutation.hpp"

namespace cyclematch {

// Per-vertex descriptor rows (n x D).
struct DescriptorSet {
  Eigen::MatrixXd table;

  int size() const { return static_cast<int>(table.rows()); }
  int dims() const { return static_cast<int>(table.cols()); }
};

struct HksParams {
  int num_eigs = 100;  // clamped to n - 2 on small meshes
  int num_times = 16;
};

/// Heat kernel signatures from the cotangent Laplacian with lumped mass,
/// sampled at log-spaced times and normalized per row. When the mesh carries
/// side labels, one extra column label * s is appended (s = mean row norm).
DescriptorSet hks(const Mesh& mesh, const HksParams& params = {});

/// Exact linear assignment maximizing sum_v <a[v], b[P(v)]>.
Permutation init_permutation(const DescriptorSet& a, const DescriptorSet& b);

/// Hungarian method: permutation minimizing sum_v cost(v, P(v)). O(n^3).
Permutation solve_assignment(const Eigen::MatrixXd& cost);

/// inits[I][J] is the initial permutation from shape I to shape J (the
/// diagonal is unused). Returns argmin_A sum_{I != A} E_IA(inits[I][A]) over
/// geodesic energies, lowest index on ties.
int select_anchor(const std::vector<GeodesicField>& shapes, const std::vector<std::vector<Permutation>>& inits);

/// Descriptor assignment for every unordered pair; inits[J][I] is the inverse
/// of inits[I][J].
std::vector<std::vector<Permutation>> all_pairs_init(const std::vector<DescriptorSet>& descriptors);

}  // namespace cyclematch
