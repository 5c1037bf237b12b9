#pragma once

#include <cstddef>
#include <vector>

#include "cyclematch/geodesic.hpp"
#include "cyclematch/permutation.hpp"

namespace cyclematch {

enum class FieldMode { Geodesic, Gaussian };

const char* to_string(FieldMode mode);

// Lazy view of the QAP energy matrix between shapes A and B:
//   W(x1 n + y1, x2 n + y2) = |fA(x1, x2) - fB(y1, y2)|
// where f is either the geodesic or the Gaussian-filtered field. W itself is
// never stored. The fields must outlive the oracle.
class EnergyOracle {
public:
  EnergyOracle(const FieldMatrix& field_a, const FieldMatrix& field_b, FieldMode mode = FieldMode::Geodesic);
  EnergyOracle(const GeodesicField& a, const GeodesicField& b);
  EnergyOracle(const KernelField& a, const KernelField& b);

  int size() const { return a_->size(); }
  FieldMode mode() const { return mode_; }
  const FieldMatrix& field_a() const { return *a_; }
  const FieldMatrix& field_b() const { return *b_; }

  double entry(int x1, int y1, int x2, int y2) const {
    ++evaluations_;
    const double d = (*a_)(x1, x2) - (*b_)(y1, y2);
    return d < 0.0 ? -d : d;
  }

  /// Number of W entries evaluated so far (instrumentation; not thread-safe).
  std::size_t evaluations() const { return evaluations_; }
  void reset_evaluations() const { evaluations_ = 0; }
  void add_evaluations(std::size_t count) const { evaluations_ += count; }

  /// Oracle for the reversed pair (B, A).
  EnergyOracle reversed() const { return EnergyOracle(*b_, *a_, mode_); }

private:
  const FieldMatrix* a_;
  const FieldMatrix* b_;
  FieldMode mode_;
  mutable std::size_t evaluations_ = 0;
};

struct MatrixEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

// Sparse n x n matrix in coordinate form with unique (row, col) keys and no
// stored zeros. Used for the update terms (c - I) P and their products.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int n, std::vector<MatrixEntry> entries);

  static SparseMatrix from_permutation(const Permutation& p);
  /// (c - I) P for the transposition c = (u v): -1 at (u,P(u)), (v,P(v)) and
  /// +1 at (u,P(v)), (v,P(u)).
  static SparseMatrix cycle_update(const TwoCycle& c, const Permutation& p);

  int size() const { return n_; }
  std::size_t nonzeros() const { return entries_.size(); }
  const std::vector<MatrixEntry>& entries() const { return entries_; }

  /// P * S (row y of S moves to row P^-1(y)).
  SparseMatrix left_multiplied(const Permutation& p) const;
  /// S * P (column y of S moves to column P(y)).
  SparseMatrix right_multiplied(const Permutation& p) const;
  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);

private:
  int n_ = 0;
  std::vector<MatrixEntry> entries_;
};

/// E(A, B) = vec(A)^T W vec(B). Cost is O(nnz(A) nnz(B)).
double energy_pair(const EnergyOracle& oracle, const Permutation& a, const Permutation& b);
double energy_pair(const EnergyOracle& oracle, const Permutation& a, const SparseMatrix& b);
double energy_pair(const EnergyOracle& oracle, const SparseMatrix& a, const Permutation& b);
double energy_pair(const EnergyOracle& oracle, const SparseMatrix& a, const SparseMatrix& b);

/// E(P) = E(P, P).
inline double energy(const EnergyOracle& oracle, const Permutation& p) { return energy_pair(oracle, p, p); }

/// F(A, B) = E(A, B) + E(B, A).
template <class A, class B>
double energy_sym(const EnergyOracle& oracle, const A& a, const B& b) {
  return energy_pair(oracle, a, b) + energy_pair(oracle, b, a);
}

/// Relative inconsistency of vertex x under P: sum_w W(x, P(x), w, P(w)).
double inconsistency(int x, const Permutation& p, const EnergyOracle& oracle);

/// The m vertices with the highest inconsistency, descending; ties go to the
/// lower index.
std::vector<int> worst_vertices(const Permutation& p, const EnergyOracle& oracle, int m);

}  // namespace cyclematch
