#pragma once

#include <span>
#include <vector>

#include "cyclematch/geodesic.hpp"
#include "cyclematch/permutation.hpp"

namespace cyclematch {

struct PckPoint {
  double threshold = 0.0;
  double fraction = 0.0;
};

struct EvalReport {
  std::vector<double> errors;
  std::vector<PckPoint> pck_curve;
  double auc = 0.0;
};

/// Thresholds 0, 0.0015, ..., 0.15 (101 points).
std::vector<double> default_threshold_grid();

/// e_v = d_J(P(v), P*(v)) / diam(J).
std::vector<double> geodesic_error(const Permutation& p, const Permutation& p_star, const GeodesicField& target);

/// Fraction of errors <= threshold.
double pck_at(std::span<const double> errors, double threshold);

/// PCK on `grid` and its trapezoidal area divided by the grid span.
EvalReport pck_auc(std::span<const double> errors, std::span<const double> grid);
inline EvalReport pck_auc(std::span<const double> errors) {
  const auto grid = default_threshold_grid();
  return pck_auc(errors, grid);
}

}  // namespace cyclematch
