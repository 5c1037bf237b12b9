#pragma once

// Shared fixtures and brute-force oracles for the test suites. Nothing here
// goes through the lazy energy path: W is materialized densely.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cyclematch/geodesic.hpp"
#include "cyclematch/mesh.hpp"
#include "cyclematch/permutation.hpp"
#include "cyclematch/rng.hpp"

namespace cyclematch::testing {

// Closed UV sphere (two poles + rings x segments), squashed into an ellipsoid
// and roughened with smooth bumps so that it has no exact symmetries.
inline Mesh bumpy_sphere(int rings, int segments, std::uint64_t seed = 7) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Eigen::Vector3d> centers(6);
  std::vector<double> heights(6);
  for (int b = 0; b < 6; ++b) {
    centers[b] = Eigen::Vector3d(unit(rng), unit(rng), unit(rng)).normalized();
    heights[b] = 0.15 + 0.1 * unit(rng);
  }
  auto place = [&](const Eigen::Vector3d& dir) {
    double r = 1.0;
    for (int b = 0; b < 6; ++b) r += heights[b] * std::exp(-4.0 * (dir - centers[b]).squaredNorm());
    return Eigen::Vector3d(1.3 * r * dir.x(), 0.9 * r * dir.y(), 0.7 * r * dir.z());
  };
  std::vector<Eigen::Vector3d> verts;
  verts.push_back(place({0, 0, 1}));
  for (int r = 0; r < rings; ++r) {
    const double theta = std::numbers::pi * (r + 1) / (rings + 1);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * (s + 0.37 * (r % 2)) / segments;
      verts.push_back(place({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)}));
    }
  }
  verts.push_back(place({0, 0, -1}));
  const int south = static_cast<int>(verts.size()) - 1;
  auto ring_vertex = [&](int r, int s) { return 1 + r * segments + ((s % segments) + segments) % segments; };
  std::vector<std::array<int, 3>> faces;
  for (int s = 0; s < segments; ++s) faces.push_back({0, ring_vertex(0, s), ring_vertex(0, s + 1)});
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s), ring_vertex(r + 1, s + 1)});
      faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s + 1), ring_vertex(r, s + 1)});
    }
  }
  for (int s = 0; s < segments; ++s) faces.push_back({south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  return make_mesh(std::move(verts), std::move(faces));
}

// 200 and 100 vertex fixtures.
inline Mesh sphere200(std::uint64_t seed = 7) { return bumpy_sphere(11, 18, seed); }
inline Mesh sphere100(std::uint64_t seed = 7) { return bumpy_sphere(7, 14, seed); }

inline Mesh icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : v) p.normalize();
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      return midpoint[key] = static_cast<int>(v.size()) - 1;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& tri : f) {
      const int a = mid(tri[0], tri[1]), b = mid(tri[1], tri[2]), c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  return make_mesh(std::move(v), std::move(f));
}

// Distances between random points in the unit cube (a metric, not a mesh).
inline FieldMatrix random_field(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
  FieldMatrix f(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) f(i, j) = (pts[i] - pts[j]).norm();
  }
  return f;
}

inline FieldMatrix relabeled_field(const FieldMatrix& f, const Permutation& relabel) {
  FieldMatrix out(f.size());
  for (int i = 0; i < f.size(); ++i) {
    for (int j = 0; j < f.size(); ++j) out(relabel(i), relabel(j)) = f(i, j);
  }
  return out;
}

inline Eigen::MatrixXd dense_permutation(const Permutation& p) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p.size(), p.size());
  for (int v = 0; v < p.size(); ++v) m(v, p(v)) = 1.0;
  return m;
}

inline Eigen::MatrixXd dense_transposition(int n, const TwoCycle& c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  m(c.u, c.u) = m(c.v, c.v) = 0.0;
  m(c.u, c.v) = m(c.v, c.u) = 1.0;
  return m;
}

// Full n^2 x n^2 energy matrix W(x1 n + y1, x2 n + y2) = |fa(x1,x2) - fb(y1,y2)|.
inline Eigen::MatrixXd dense_w(const FieldMatrix& fa, const FieldMatrix& fb) {
  const int n = fa.size();
  Eigen::MatrixXd w(n * n, n * n);
  for (int x1 = 0; x1 < n; ++x1)
    for (int y1 = 0; y1 < n; ++y1)
      for (int x2 = 0; x2 < n; ++x2)
        for (int y2 = 0; y2 < n; ++y2) w(x1 * n + y1, x2 * n + y2) = std::abs(fa(x1, x2) - fb(y1, y2));
  return w;
}

// vec() in the row-major sense matching the x n + y indexing.
inline Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(n * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) v(x * n + y) = m(x, y);
  return v;
}

inline double dense_energy(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return vec(a).dot(w * vec(b));
}

inline CycleBatch random_batch(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<TwoCycle> cycles;
  for (int i = 0; i < k; ++i) cycles.push_back({idx[2 * i], idx[2 * i + 1]});
  return CycleBatch(std::move(cycles));
}

// Dense model of one three-shape QUBO instance: the exact objective and the
// sum of the truly cubic / quartic summands that the QUBO omits.
struct DenseTriplet {
  Eigen::MatrixXd wxy, wyz, wxz;
  Eigen::MatrixXd pxy, pyz;
  std::vector<Eigen::MatrixXd> c, ct;  // (c_i - I) P_XY and (c~_j - I) P_YZ

  DenseTriplet(const FieldMatrix& fx, const FieldMatrix& fy, const FieldMatrix& fz, const Permutation& p_xy,
               const Permutation& p_yz, const CycleBatch& bx, const CycleBatch& by)
      : wxy(dense_w(fx, fy)), wyz(dense_w(fy, fz)), wxz(dense_w(fx, fz)), pxy(dense_permutation(p_xy)),
        pyz(dense_permutation(p_yz)) {
    const int n = p_xy.size();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < bx.size(); ++i) c.push_back((dense_transposition(n, bx[i]) - id) * pxy);
    for (int j = 0; j < by.size(); ++j) ct.push_back((dense_transposition(n, by[j]) - id) * pyz);
  }

  // Objective with the cycle-consistent parameterization, straight from the
  // dense matrices.
  double objective(const std::vector<std::uint8_t>& bits) const {
    const int k = static_cast<int>(c.size());
    Eigen::MatrixXd a = pxy, b = pyz;
    for (int i = 0; i < k; ++i) {
      if (bits[i]) a += c[i];
      if (bits[k + i]) b += ct[i];
    }
    return dense_energy(wxy, a, a) + dense_energy(wyz, b, b) + dense_energy(wxz, a * b, a * b);
  }

  double dropped(const std::vector<std::uint8_t>& bits) const {
    const int k = static_cast<int>(c.size());
    auto al = [&](int i) { return bits[i] != 0; };
    auto be = [&](int j) { return bits[k + j] != 0; };
    auto exz = [&](const Eigen::MatrixXd& l, const Eigen::MatrixXd& r) { return dense_energy(wxz, l, r); };
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      if (!al(i)) continue;
      for (int j = 0; j < k; ++j) {
        if (!be(j)) continue;
        const Eigen::MatrixXd kij = c[i] * ct[j];
        // alpha_i beta_j beta_l, l != j
        for (int l = 0; l < k; ++l) {
          if (l == j || !be(l)) continue;
          const Eigen::MatrixXd bl = pxy * ct[l];
          total += exz(bl, kij) + exz(kij, bl);
        }
        // alpha_i alpha_q beta_j, q != i
        for (int q = 0; q < k; ++q) {
          if (q == i || !al(q)) continue;
          const Eigen::MatrixXd aq = c[q] * pyz;
          total += exz(aq, kij) + exz(kij, aq);
        }
        // alpha_i beta_j alpha_q beta_l, (q, l) != (i, j)
        for (int q = 0; q < k; ++q) {
          if (!al(q)) continue;
          for (int l = 0; l < k; ++l) {
            if (!be(l) || (q == i && l == j)) continue;
            total += exz(kij, c[q] * ct[l]);
          }
        }
      }
    }
    return total;
  }
};

inline Mesh relabel(const Mesh& mesh, const Permutation& p) {
  return relabel_vertices(mesh, std::vector<int>(p.map().begin(), p.map().end()));
}

inline std::vector<std::uint8_t> bits_of(std::uint64_t x, int n) {
  std::vector<std::uint8_t> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((x >> i) & 1U);
  return bits;
}

}  // namespace cyclematch::testing
