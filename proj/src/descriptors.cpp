#include "cyclematch/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "cyclematch/energy.hpp"
#include "cyclematch/error.hpp"

namespace cyclematch {
namespace {

double cotangent(const Eigen::Vector3d& apex, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d u = a - apex;
  const Eigen::Vector3d v = b - apex;
  const double cross = u.cross(v).norm();
  if (cross <= std::numeric_limits<double>::min()) return 0.0;
  return u.dot(v) / cross;
}

}  // namespace

DescriptorSet hks(const Mesh& mesh, const HksParams& params) {
  const int n = mesh.num_vertices();
  if (params.num_times < 1) throw ParameterError("HKS needs at least one time sample");
  if (params.num_eigs < 2) throw ParameterError("HKS needs at least two eigenpairs, got " + std::to_string(params.num_eigs));
  if (n < 4) throw ParameterError("HKS needs a mesh with at least 4 vertices");
  const int num_eigs = std::min(params.num_eigs, std::max(2, n - 2));

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  for (const auto& f : mesh.faces) {
    const auto& p0 = mesh.vertices[f[0]];
    const auto& p1 = mesh.vertices[f[1]];
    const auto& p2 = mesh.vertices[f[2]];
    const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    for (int k = 0; k < 3; ++k) {
      const int i = f[(k + 1) % 3];
      const int j = f[(k + 2) % 3];
      const double w = 0.5 * cotangent(mesh.vertices[f[k]], mesh.vertices[i], mesh.vertices[j]);
      stiffness(i, j) -= w;
      stiffness(j, i) -= w;
      stiffness(i, i) += w;
      stiffness(j, j) += w;
      mass(f[k]) += area / 3.0;
    }
  }
  if ((mass.array() <= 0.0).any()) throw ParameterError("mesh has vertices with zero area");

  // Symmetric form M^-1/2 L M^-1/2 of the generalized problem L phi = lambda M phi.
  const Eigen::VectorXd inv_sqrt_mass = mass.array().rsqrt();
  const Eigen::MatrixXd sym = inv_sqrt_mass.asDiagonal() * stiffness * inv_sqrt_mass.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw SolverError("Laplace-Beltrami eigensolver did not converge");
  }
  const Eigen::VectorXd lambda = solver.eigenvalues().head(num_eigs).cwiseMax(0.0);
  const Eigen::MatrixXd psi = solver.eigenvectors().leftCols(num_eigs);
  const double residual = (sym * psi - psi * solver.eigenvalues().head(num_eigs).asDiagonal()).norm();
  if (!std::isfinite(residual) || residual > 1e-6 * std::max(1.0, sym.norm())) {
    throw SolverError("Laplace-Beltrami eigensolver residual too large: " + std::to_string(residual));
  }
  const Eigen::MatrixXd phi = inv_sqrt_mass.asDiagonal() * psi;

  const double lambda_small = lambda(1) > 0.0 ? lambda(1) : 1e-12;
  const double lambda_large = std::max(lambda(num_eigs - 1), lambda_small);
  const double t_min = 4.0 * std::log(10.0) / lambda_large;
  const double t_max = 4.0 * std::log(10.0) / lambda_small;

  const bool labeled = mesh.side_labels.has_value();
  DescriptorSet out;
  out.table = Eigen::MatrixXd::Zero(n, params.num_times + (labeled ? 1 : 0));
  const Eigen::MatrixXd phi_sq = phi.array().square();
  for (int s = 0; s < params.num_times; ++s) {
    const double frac = params.num_times == 1 ? 0.0 : static_cast<double>(s) / (params.num_times - 1);
    const double t = t_min * std::pow(t_max / t_min, frac);
    const Eigen::VectorXd decay = (-lambda.array() * t).exp();
    out.table.col(s) = phi_sq * decay;
  }
  double norm_sum = 0.0;
  for (int v = 0; v < n; ++v) {
    auto row = out.table.row(v).head(params.num_times);
    const double len = row.norm();
    if (len > 0.0) row /= len;
    norm_sum += row.norm();
  }
  if (labeled) {
    if (mesh.side_labels->size() != static_cast<std::size_t>(n)) throw DimensionError("side label count differs from vertex count");
    const double weight = norm_sum / n;
    for (int v = 0; v < n; ++v) out.table(v, params.num_times) = weight * (*mesh.side_labels)[v];
  }
  return out;
}

Permutation solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionError("assignment cost matrix must be square");
  if (n == 0) return Permutation::identity(0);
  // Shortest augmenting path with potentials; rows and columns 1-based, 0 is a sentinel.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double slack = cost(r - 1, col - 1) - u[r] - v[col];
        if (slack < min_slack[col]) {
          min_slack[col] = slack;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> map(n);
  for (int col = 1; col <= n; ++col) map[match[col] - 1] = col - 1;
  return Permutation(std::move(map));
}

Permutation init_permutation(const DescriptorSet& a, const DescriptorSet& b) {
  if (a.size() != b.size() || a.dims() != b.dims()) {
    throw DimensionError("descriptor sets differ in shape: " + std::to_string(a.size()) + "x" + std::to_string(a.dims()) +
                         " vs " + std::to_string(b.size()) + "x" + std::to_string(b.dims()));
  }
  const Eigen::MatrixXd similarity = a.table * b.table.transpose();
  return solve_assignment(-similarity);
}

std::vector<std::vector<Permutation>> all_pairs_init(const std::vector<DescriptorSet>& descriptors) {
  const auto count = descriptors.size();
  std::vector<std::vector<Permutation>> inits(count, std::vector<Permutation>(count));
  for (std::size_t i = 0; i < count; ++i) {
    inits[i][i] = Permutation::identity(descriptors[i].size());
    for (std::size_t j = i + 1; j < count; ++j) {
      inits[i][j] = init_permutation(descriptors[i], descriptors[j]);
      inits[j][i] = inits[i][j].inverse();
    }
  }
  return inits;
}

int select_anchor(const std::vector<GeodesicField>& shapes, const std::vector<std::vector<Permutation>>& inits) {
  const int count = static_cast<int>(shapes.size());
  if (inits.size() != shapes.size()) throw DimensionError("initial permutation table does not match shape count");
  int best = 0;
  double best_total = std::numeric_limits<double>::infinity();
  for (int anchor = 0; anchor < count; ++anchor) {
    double total = 0.0;
    for (int other = 0; other < count; ++other) {
      if (other == anchor) continue;
      total += energy(EnergyOracle(shapes[other], shapes[anchor]), inits[other][anchor]);
    }
    if (total < best_total) {
      best_total = total;
      best = anchor;
    }
  }
  return best;
}

}  // namespace cyclematch
