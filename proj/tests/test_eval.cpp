#include <cmath>

#include "doctest.h"

#include "cyclematch/eval.hpp"
#include "support.hpp"

using namespace cyclematch;

TEST_CASE("threshold grid") {
  const auto grid = default_threshold_grid();
  REQUIRE(grid.size() == 101);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(0.15));
  CHECK(grid[50] == doctest::Approx(0.075));
}

TEST_CASE("PCK and AUC examples") {
  const std::vector<double> zeros(10, 0.0);
  CHECK(pck_auc(zeros).auc == doctest::Approx(1.0));
  const std::vector<double> far(10, 0.2);
  CHECK(pck_auc(far).auc == 0.0);
  const std::vector<double> mixed{0.0, 0.075};
  const EvalReport r = pck_auc(mixed);
  CHECK(r.auc == doctest::Approx(0.7525).epsilon(1e-12));
  CHECK(r.pck_curve[50].fraction == 1.0);  // <= at the threshold
  CHECK(r.pck_curve[49].fraction == 0.5);
  CHECK(pck_at(mixed, 0.05) == 0.5);
}

TEST_CASE("geodesic errors") {
  // Path 0-1-2-3 with unit edges: diameter 3.
  const GeodesicField path = geodesic_all_pairs(4, {{0, 1}, {1, 2}, {2, 3}}, {1.0, 1.0, 1.0});
  const Permutation truth = Permutation::identity(4);
  const auto none = geodesic_error(truth, truth, path);
  for (double e : none) CHECK(e == 0.0);
  const auto swapped = geodesic_error(Permutation({3, 1, 2, 0}), truth, path);
  CHECK(swapped == std::vector<double>{1.0, 0.0, 0.0, 1.0});
  const auto shifted = geodesic_error(Permutation({1, 0, 2, 3}), truth, path);
  CHECK(shifted[0] == doctest::Approx(1.0 / 3.0));
  CHECK(shifted[1] == doctest::Approx(1.0 / 3.0));
  CHECK(pck_at(shifted, 0.15) == 0.5);
}

TEST_CASE("PCK is monotone") {
  Rng rng(3);
  std::uniform_real_distribution<double> unit(0.0, 0.2);
  std::vector<double> errors(200);
  for (auto& e : errors) e = unit(rng);
  const auto r = pck_auc(errors);
  for (std::size_t i = 1; i < r.pck_curve.size(); ++i) CHECK(r.pck_curve[i].fraction >= r.pck_curve[i - 1].fraction);
  CHECK(r.auc > 0.0);
  CHECK(r.auc < 1.0);
}
