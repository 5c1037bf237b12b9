#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <map>
#include <set>

#include "doctest.h"

#include "cyclematch/error.hpp"
#include "cyclematch/permutation.hpp"
#include "support.hpp"

using namespace cyclematch;
using testing::dense_permutation;
using testing::dense_transposition;

TEST_CASE("permutation basics") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), ParameterError);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), ParameterError);
  const Permutation p({2, 0, 1});
  CHECK(p.inverse().then(p) == Permutation::identity(3));
  CHECK(p.then(p.inverse()) == Permutation::identity(3));
  // then() is the matrix product.
  const Permutation q({1, 2, 0});
  CHECK(dense_permutation(p.then(q)) == dense_permutation(p) * dense_permutation(q));
}

TEST_CASE("cae_apply examples") {
  const Permutation id = Permutation::identity(3);
  const CycleBatch batch({{0, 1}});
  CHECK(cae_apply(id, batch, std::vector<std::uint8_t>{0}) == id);
  CHECK(cae_apply(id, batch, std::vector<std::uint8_t>{1}) == Permutation({1, 0, 2}));
  CHECK_THROWS_AS(CycleBatch({{0, 1}, {1, 2}}), ParameterError);
  CHECK_THROWS_AS(CycleBatch({{2, 2}}), ParameterError);
  CHECK_THROWS_AS(cae_apply(id, batch, std::vector<std::uint8_t>{1, 0}), DimensionError);
}

TEST_CASE("cae_apply matches the dense linear form for all alphas") {
  Rng rng(5);
  const int n = 6;
  for (int trial = 0; trial < 20; ++trial) {
    const Permutation p = Permutation::random(n, rng());
    const CycleBatch batch = testing::random_batch(n, 3, rng);
    const Eigen::MatrixXd dp = dense_permutation(p);
    for (std::uint64_t a = 0; a < 8; ++a) {
      const auto alpha = testing::bits_of(a, 3);
      Eigen::MatrixXd expected = dp;
      for (int i = 0; i < 3; ++i) {
        if (alpha[i]) expected += (dense_transposition(n, batch[i]) - Eigen::MatrixXd::Identity(n, n)) * dp;
      }
      CHECK(dense_permutation(cae_apply(p, batch, alpha)) == expected);
    }
  }
}

TEST_CASE("cae_apply properties") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 30);
    const int k = static_cast<int>(rng() % (n / 2 + 1));
    const Permutation p = Permutation::random(n, rng());
    const CycleBatch batch = testing::random_batch(n, k, rng);
    std::vector<std::uint8_t> alpha(k);
    for (auto& a : alpha) a = rng() & 1U;
    const Permutation once = cae_apply(p, batch, alpha);
    // Constructor validates bijectivity.
    CHECK_NOTHROW(Permutation(std::vector<int>(once.map().begin(), once.map().end())));
    CHECK(cae_apply(once, batch, alpha) == p);
    // Order independence within a disjoint batch.
    std::vector<TwoCycle> reversed(batch.cycles().rbegin(), batch.cycles().rend());
    std::vector<std::uint8_t> reversed_alpha(alpha.rbegin(), alpha.rend());
    CHECK(cae_apply(p, CycleBatch(reversed), reversed_alpha) == once);
  }
}

namespace {

void check_factorization(const std::vector<int>& vertices, const CycleFactorization& fx) {
  const int m = static_cast<int>(vertices.size());
  REQUIRE(static_cast<int>(fx.rounds.size()) == m - 1);
  std::set<std::pair<int, int>> seen;
  for (const auto& round : fx.rounds) {
    REQUIRE(round.size() == m / 2);
    std::set<int> used;
    for (const auto& c : round.cycles()) {
      REQUIRE(std::find(vertices.begin(), vertices.end(), c.u) != vertices.end());
      REQUIRE(std::find(vertices.begin(), vertices.end(), c.v) != vertices.end());
      used.insert(c.u);
      used.insert(c.v);
      REQUIRE(seen.insert(std::minmax(c.u, c.v)).second);
    }
    REQUIRE(static_cast<int>(used.size()) == m);
  }
  REQUIRE(static_cast<int>(seen.size()) == m * (m - 1) / 2);
}

}  // namespace

TEST_CASE("one_factorization examples") {
  const std::vector<int> two{4, 9};
  const auto f2 = one_factorization(two, 1);
  REQUIRE(f2.rounds.size() == 1);
  CHECK(std::pair<int, int>(std::minmax(f2.rounds[0][0].u, f2.rounds[0][0].v)) == std::pair(4, 9));

  const std::vector<int> four{10, 11, 12, 13};
  check_factorization(four, one_factorization(four, 3));

  const std::vector<int> six{0, 5, 7, 9, 21, 33};
  const auto a = one_factorization(six, 99);
  const auto b = one_factorization(six, 99);
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    for (int i = 0; i < a.rounds[r].size(); ++i) CHECK(a.rounds[r][i] == b.rounds[r][i]);
  }
  CHECK_THROWS_AS(one_factorization(std::vector<int>{1, 2, 3}, 0), ParameterError);
  CHECK_THROWS_AS(one_factorization(std::vector<int>{}, 0), ParameterError);
}

TEST_CASE("one_factorization covers every pair exactly once up to m = 64") {
  Rng rng(8);
  for (int m = 2; m <= 64; m += 2) {
    std::vector<int> vertices(m);
    std::iota(vertices.begin(), vertices.end(), 100);
    std::shuffle(vertices.begin(), vertices.end(), rng);
    check_factorization(vertices, one_factorization(vertices, rng()));
  }
}

TEST_CASE("pair_rounds") {
  const std::vector<int> vx{0, 1}, vy{2, 3};
  const auto one = pair_rounds(one_factorization(vx, 1), one_factorization(vy, 2), 3);
  CHECK(one.size() == 1);

  const std::vector<int> x4{0, 1, 2, 3}, y4{4, 5, 6, 7}, y6{0, 1, 2, 3, 4, 5};
  const auto fx = one_factorization(x4, 1);
  const auto fy = one_factorization(y4, 2);
  CHECK_THROWS_AS(pair_rounds(fx, one_factorization(y6, 2), 0), DimensionError);

  auto signature = [&](const std::vector<RoundPair>& pairs) {
    std::vector<int> sig;
    for (const auto& p : pairs) {
      for (std::size_t r = 0; r < fy.rounds.size(); ++r) {
        if (fy.rounds[r][0] == p.y[0]) sig.push_back(static_cast<int>(r));
      }
    }
    return sig;
  };
  CHECK(signature(pair_rounds(fx, fy, 77)) == signature(pair_rounds(fx, fy, 77)));
  auto sig = signature(pair_rounds(fx, fy, 77));
  std::sort(sig.begin(), sig.end());
  CHECK(sig == std::vector<int>{0, 1, 2});

  // Uniformity over the 3! bijections: chi-square with 5 dof.
  std::map<std::vector<int>, int> counts;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) ++counts[signature(pair_rounds(fx, fy, derive_seed(s, {})))];
  CHECK(counts.size() == 6);
  double chi2 = 0.0;
  const double expected = trials / 6.0;
  for (const auto& [key, c] : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
    CHECK(std::abs(c - expected) < 5.0 * std::sqrt(expected * (5.0 / 6.0)));
  }
  CHECK(chi2 < 20.5);  // p ~ 0.001 for 5 dof
}

TEST_CASE("permutation file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "cyclematch_perm.txt";
  const Permutation p = Permutation::random(50, 4);
  save_permutation(p, path);
  CHECK(load_permutation(path) == p);
  std::ofstream(path) << "0\n0\n";
  CHECK_THROWS_AS(load_permutation(path), ParseError);
}
