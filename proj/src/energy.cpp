#include "cyclematch/energy.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cyclematch/error.hpp"

namespace cyclematch {

const char* to_string(FieldMode mode) { return mode == FieldMode::Geodesic ? "geodesic" : "gaussian"; }

EnergyOracle::EnergyOracle(const FieldMatrix& field_a, const FieldMatrix& field_b, FieldMode mode)
    : a_(&field_a), b_(&field_b), mode_(mode) {
  if (field_a.size() != field_b.size()) {
    throw DimensionError("energy oracle fields differ in size: " + std::to_string(field_a.size()) + " vs " +
                         std::to_string(field_b.size()));
  }
}

EnergyOracle::EnergyOracle(const GeodesicField& a, const GeodesicField& b)
    : EnergyOracle(a.dist, b.dist, FieldMode::Geodesic) {}

EnergyOracle::EnergyOracle(const KernelField& a, const KernelField& b)
    : EnergyOracle(a.values, b.values, FieldMode::Gaussian) {}

SparseMatrix::SparseMatrix(int n, std::vector<MatrixEntry> entries) : n_(n) {
  std::sort(entries.begin(), entries.end(),
            [](const MatrixEntry& l, const MatrixEntry& r) { return l.row != r.row ? l.row < r.row : l.col < r.col; });
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n) throw DimensionError("sparse entry outside matrix");
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const MatrixEntry& e) { return e.value == 0.0; });
}

SparseMatrix SparseMatrix::from_permutation(const Permutation& p) {
  std::vector<MatrixEntry> entries;
  entries.reserve(p.size());
  for (int v = 0; v < p.size(); ++v) entries.push_back({v, p(v), 1.0});
  return SparseMatrix(p.size(), std::move(entries));
}

SparseMatrix SparseMatrix::cycle_update(const TwoCycle& c, const Permutation& p) {
  if (c.u == c.v) throw ParameterError("2-cycle with identical endpoints");
  return SparseMatrix(p.size(), {{c.u, p(c.u), -1.0}, {c.v, p(c.v), -1.0}, {c.u, p(c.v), 1.0}, {c.v, p(c.u), 1.0}});
}

SparseMatrix SparseMatrix::left_multiplied(const Permutation& p) const {
  if (p.size() != n_) throw DimensionError("permutation size differs from sparse matrix");
  const Permutation inv = p.inverse();
  std::vector<MatrixEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({inv(e.row), e.col, e.value});
  return SparseMatrix(n_, std::move(out));
}

SparseMatrix SparseMatrix::right_multiplied(const Permutation& p) const {
  if (p.size() != n_) throw DimensionError("permutation size differs from sparse matrix");
  std::vector<MatrixEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.row, p(e.col), e.value});
  return SparseMatrix(n_, std::move(out));
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.n_ != b.n_) throw DimensionError("sparse matrix sizes differ");
  std::vector<MatrixEntry> out;
  for (const auto& ea : a.entries_) {
    for (const auto& eb : b.entries_) {
      if (ea.col == eb.row) out.push_back({ea.row, eb.col, ea.value * eb.value});
    }
  }
  return SparseMatrix(a.n_, std::move(out));
}

namespace {

void check_size(const EnergyOracle& oracle, int n) {
  if (n != oracle.size()) {
    throw DimensionError("operand of size " + std::to_string(n) + " used with oracle of size " +
                         std::to_string(oracle.size()));
  }
}

}  // namespace

double energy_pair(const EnergyOracle& oracle, const Permutation& a, const Permutation& b) {
  check_size(oracle, a.size());
  check_size(oracle, b.size());
  const int n = a.size();
  const FieldMatrix& fa = oracle.field_a();
  const FieldMatrix& fb = oracle.field_b();
  double total = 0.0;
  for (int x1 = 0; x1 < n; ++x1) {
    const double* ra = fa.row(x1);
    const double* rb = fb.row(a(x1));
    double row_sum = 0.0;
    for (int x2 = 0; x2 < n; ++x2) {
      const double d = ra[x2] - rb[b(x2)];
      row_sum += d < 0.0 ? -d : d;
    }
    total += row_sum;
  }
  oracle.add_evaluations(static_cast<std::size_t>(n) * n);
  return total;
}

double energy_pair(const EnergyOracle& oracle, const Permutation& a, const SparseMatrix& b) {
  check_size(oracle, a.size());
  check_size(oracle, b.size());
  double total = 0.0;
  for (const auto& e : b.entries()) {
    double col_sum = 0.0;
    for (int x1 = 0; x1 < a.size(); ++x1) col_sum += oracle.entry(x1, a(x1), e.row, e.col);
    total += e.value * col_sum;
  }
  return total;
}

double energy_pair(const EnergyOracle& oracle, const SparseMatrix& a, const Permutation& b) {
  check_size(oracle, a.size());
  check_size(oracle, b.size());
  double total = 0.0;
  for (const auto& e : a.entries()) {
    double row_sum = 0.0;
    for (int x2 = 0; x2 < b.size(); ++x2) row_sum += oracle.entry(e.row, e.col, x2, b(x2));
    total += e.value * row_sum;
  }
  return total;
}

double energy_pair(const EnergyOracle& oracle, const SparseMatrix& a, const SparseMatrix& b) {
  check_size(oracle, a.size());
  check_size(oracle, b.size());
  double total = 0.0;
  for (const auto& ea : a.entries()) {
    for (const auto& eb : b.entries()) total += ea.value * eb.value * oracle.entry(ea.row, ea.col, eb.row, eb.col);
  }
  return total;
}

double inconsistency(int x, const Permutation& p, const EnergyOracle& oracle) {
  check_size(oracle, p.size());
  if (x < 0 || x >= p.size()) throw ParameterError("vertex index out of range");
  double total = 0.0;
  for (int w = 0; w < p.size(); ++w) total += oracle.entry(x, p(x), w, p(w));
  return total;
}

std::vector<int> worst_vertices(const Permutation& p, const EnergyOracle& oracle, int m) {
  const int n = p.size();
  if (m < 0 || m % 2 != 0) throw ParameterError("worst-vertex count must be even, got " + std::to_string(m));
  if (m > n) throw ParameterError("worst-vertex count " + std::to_string(m) + " exceeds vertex count " + std::to_string(n));
  std::vector<double> score(n);
  for (int x = 0; x < n; ++x) score[x] = inconsistency(x, p, oracle);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) { return score[l] > score[r]; });
  order.resize(m);
  return order;
}

}  // namespace cyclematch
