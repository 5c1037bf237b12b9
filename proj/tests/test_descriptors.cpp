#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "cyclematch/descriptors.hpp"
#include "cyclematch/energy.hpp"
#include "cyclematch/error.hpp"
#include "support.hpp"

using namespace cyclematch;
using namespace cyclematch::testing;

namespace {

double assignment_cost(const Eigen::MatrixXd& cost, const Permutation& p) {
  double total = 0.0;
  for (int v = 0; v < p.size(); ++v) total += cost(v, p(v));
  return total;
}

double similarity(const DescriptorSet& a, const DescriptorSet& b, const Permutation& p) {
  double total = 0.0;
  for (int v = 0; v < p.size(); ++v) total += a.table.row(v).dot(b.table.row(p(v)));
  return total;
}

}  // namespace

TEST_CASE("assignment matches brute force") {
  Rng rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 7;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = unit(rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      best = std::min(best, assignment_cost(cost, Permutation(perm)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(assignment_cost(cost, solve_assignment(cost)) == doctest::Approx(best).epsilon(1e-12));
  }
  CHECK_THROWS_AS(solve_assignment(Eigen::MatrixXd(2, 3)), DimensionError);
}

TEST_CASE("init_permutation examples") {
  DescriptorSet a{Eigen::MatrixXd(3, 1)}, b{Eigen::MatrixXd(3, 1)};
  a.table << 0, 1, 2;
  b.table << 2, 0, 1;
  // Maximizing sum a_v b_P(v): 2 -> 0 (b = 2), 1 -> 2 (b = 1), 0 -> 1.
  const Permutation p = init_permutation(a, b);
  CHECK(p == Permutation({1, 2, 0}));

  Rng rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  DescriptorSet d{Eigen::MatrixXd(30, 5)};
  for (int i = 0; i < 30; ++i) {
    d.table.row(i) = Eigen::RowVectorXd::NullaryExpr(5, [&] { return g(rng); });
    d.table.row(i).normalize();
  }
  CHECK(init_permutation(d, d) == Permutation::identity(30));
  const Permutation pi = Permutation::random(30, 3);
  DescriptorSet e{Eigen::MatrixXd(30, 5)};
  for (int v = 0; v < 30; ++v) e.table.row(pi(v)) = d.table.row(v);
  const Permutation recovered = init_permutation(d, e);
  CHECK(recovered == pi);

  DescriptorSet noisy{Eigen::MatrixXd(30, 5)};
  for (int i = 0; i < 30; ++i) noisy.table.row(i) = Eigen::RowVectorXd::NullaryExpr(5, [&] { return g(rng); });
  const double best = similarity(d, noisy, init_permutation(d, noisy));
  for (int t = 0; t < 1000; ++t) CHECK(similarity(d, noisy, Permutation::random(30, 100 + t)) <= best + 1e-12);
}

TEST_CASE("heat kernel signatures") {
  const Mesh mesh = icosphere(2);
  const DescriptorSet d = hks(mesh, {40, 16});
  CHECK(d.size() == mesh.vertices.size());
  CHECK(d.dims() == 16);
  for (int v = 0; v < d.size(); ++v) CHECK(d.table.row(v).norm() == doctest::Approx(1.0));
  const DescriptorSet again = hks(mesh, {40, 16});
  CHECK((d.table - again.table).norm() == 0.0);

  // Antipodal points of a sphere look alike.
  for (int v = 0; v < 12; ++v) {
    int antipode = 0;
    double best = 1e9;
    for (int w = 0; w < d.size(); ++w) {
      const double dist = (mesh.vertices[w] + mesh.vertices[v]).norm();
      if (dist < best) best = dist, antipode = w;
    }
    CHECK(d.table.row(v).dot(d.table.row(antipode)) > 0.99);
  }

  // Vertex order does not change the descriptor of a vertex.
  const Mesh bumpy = sphere100();
  const Permutation shuffle = Permutation::random(bumpy.vertices.size(), 4);
  const DescriptorSet base = hks(bumpy, {30, 8});
  const DescriptorSet moved = hks(relabel(bumpy, shuffle), {30, 8});
  double worst = 0.0;
  for (int v = 0; v < base.size(); ++v) worst = std::max(worst, (base.table.row(v) - moved.table.row(shuffle(v))).norm());
  CHECK(worst < 1e-6);
  CHECK(init_permutation(base, moved) == shuffle);

  CHECK_THROWS_AS(hks(mesh, {1, 16}), ParameterError);
  CHECK_THROWS_AS(hks(mesh, {40, 0}), ParameterError);
}

TEST_CASE("side labels extend the descriptor") {
  Mesh mesh = icosphere(1);
  mesh.side_labels = std::vector<std::uint8_t>(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) (*mesh.side_labels)[v] = mesh.vertices[v].x() > 0 ? 1 : 0;
  const DescriptorSet d = hks(mesh, {20, 6});
  CHECK(d.dims() == 7);
  for (int v = 0; v < d.size(); ++v) CHECK((d.table(v, 6) > 0) == (mesh.vertices[v].x() > 0));
}

TEST_CASE("select_anchor") {
  const Mesh mesh = sphere100();
  const std::vector<GeodesicField> geo{geodesic_all_pairs(mesh), geodesic_all_pairs(mesh), geodesic_all_pairs(mesh)};
  const int n = geo[0].dist.size();
  const Permutation id = Permutation::identity(n);
  std::vector<std::vector<Permutation>> inits(3, std::vector<Permutation>(3, id));
  CHECK(select_anchor(geo, inits) == 0);  // all zero: lowest index

  // Scramble everything into 0 and 1; shape 2 keeps the identity.
  inits[1][0] = inits[2][0] = Permutation::random(n, 1);
  inits[0][1] = inits[2][1] = Permutation::random(n, 2);
  CHECK(select_anchor(geo, inits) == 2);

  // Exhaustive check of the argmin against direct sums.
  for (int trial = 0; trial < 5; ++trial) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) inits[i][j] = Permutation::random(n, 10 * trial + 3 * i + j);
    std::vector<double> cost(3, 0.0);
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        if (i != a) cost[a] += energy(EnergyOracle(geo[i], geo[a]), inits[i][a]);
    CHECK(select_anchor(geo, inits) == std::min_element(cost.begin(), cost.end()) - cost.begin());
  }
}
