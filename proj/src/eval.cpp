#include "cyclematch/eval.hpp"

#include <algorithm>

#include "cyclematch/error.hpp"

namespace cyclematch {

std::vector<double> default_threshold_grid() {
  constexpr int kPoints = 101;
  constexpr double kSpan = 0.15;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[i] = kSpan * i / (kPoints - 1);
  return grid;
}

std::vector<double> geodesic_error(const Permutation& p, const Permutation& p_star, const GeodesicField& target) {
  if (p.size() != p_star.size() || p.size() != target.size()) {
    throw DimensionError("evaluation inputs differ in size");
  }
  if (!(target.diameter > 0.0)) throw ParameterError("target shape has zero diameter");
  std::vector<double> errors(p.size());
  for (int v = 0; v < p.size(); ++v) errors[v] = target.dist(p(v), p_star(v)) / target.diameter;
  return errors;
}

double pck_at(std::span<const double> errors, double threshold) {
  if (errors.empty()) throw ParameterError("no errors to evaluate");
  const auto hits = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

EvalReport pck_auc(std::span<const double> errors, std::span<const double> grid) {
  if (errors.empty()) throw ParameterError("no errors to evaluate");
  if (grid.size() < 2) throw ParameterError("threshold grid needs at least two points");
  EvalReport report;
  report.errors.assign(errors.begin(), errors.end());
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  for (double t : grid) {
    const auto hits = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    report.pck_curve.push_back({t, static_cast<double>(hits) / static_cast<double>(sorted.size())});
  }
  double area = 0.0;
  for (std::size_t i = 1; i < report.pck_curve.size(); ++i) {
    const auto& a = report.pck_curve[i - 1];
    const auto& b = report.pck_curve[i];
    area += 0.5 * (a.fraction + b.fraction) * (b.threshold - a.threshold);
  }
  report.auc = area / (grid.back() - grid.front());
  return report;
}

}  // namespace cyclematch
