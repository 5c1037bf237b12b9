#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyclematch/energy.hpp"
#include "cyclematch/permutation.hpp"

namespace cyclematch {

// min over alpha in {0,1}^n of alpha^T W alpha + constant, with W symmetric.
// Off-diagonal couplings are stored split in half across (i,j) and (j,i).
//
// After kernelization, `variables()` maps each remaining variable to its index
// in the original problem and `fixed()` lists the original variables whose
// value was decided up front; `constant()` already includes their energy.
class QuboProblem {
public:
  QuboProblem() = default;
  explicit QuboProblem(int num_vars, double constant = 0.0);

  int num_vars() const { return n_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  void add_constant(double c) { constant_ += c; }

  double weight(int i, int j) const { return w_[static_cast<std::size_t>(i) * n_ + j]; }
  /// Adds c to the linear coefficient of alpha_i.
  void add_linear(int i, double c) { w_[static_cast<std::size_t>(i) * n_ + i] += c; }
  /// Adds c to the coefficient of alpha_i alpha_j (i != j), split symmetrically.
  void add_coupling(int i, int j, double c);
  /// Adds c to the coefficient of alpha_i alpha_j, diagonal if i == j.
  void add_term(int i, int j, double c) { i == j ? add_linear(i, c) : add_coupling(i, j, c); }

  /// alpha^T W alpha (constant excluded).
  double evaluate(std::span<const std::uint8_t> alpha) const;

  int original_num_vars() const { return original_n_; }
  const std::vector<int>& variables() const { return variables_; }
  const std::vector<std::pair<int, std::uint8_t>>& fixed() const { return fixed_; }
  /// Lifts an assignment of this problem's variables to the original problem.
  std::vector<std::uint8_t> expand(std::span<const std::uint8_t> alpha) const;

  double max_abs_weight() const;
  /// Mean |w| over the non-zero upper-triangular coefficients.
  double mean_abs_weight() const;

  friend QuboProblem kernelize(const QuboProblem& q);

private:
  int n_ = 0;
  double constant_ = 0.0;
  std::vector<double> w_;
  int original_n_ = 0;
  std::vector<int> variables_;
  std::vector<std::pair<int, std::uint8_t>> fixed_;
};

/// Fixes every variable whose linear term dominates its total coupling
/// magnitude (|b_q| >= 2 sum_i |W_qi|), folds it into the remaining linear terms
/// and the constant, and repeats until nothing changes.
QuboProblem kernelize(const QuboProblem& q);

// JSON form: {"num_vars", "constant", "entries": [[i, j, w], ...]} with i <= j
// and energy = sum_entries w alpha_i alpha_j. Reading also accepts i > j and
// repeated keys; all entries are summed into the coefficient of alpha_i alpha_j.
nlohmann::json qubo_to_json(const QuboProblem& q);
QuboProblem qubo_from_json(const nlohmann::json& doc);
nlohmann::json qubo_entries(const QuboProblem& q);

struct TripletOracles {
  EnergyOracle xy;
  EnergyOracle yz;
  EnergyOracle xz;
};

struct QuboBuildOptions {
  // The offset costs O(n^2); the matching loop does not need it.
  bool compute_constant = true;
};

/// Builds the 2k-variable QUBO for one cycle-consistent alpha-expansion step:
/// variables 0..k-1 select transpositions of `batch_x` applied to P_XY, variables
/// k..2k-1 select transpositions of `batch_y` applied to P_YZ. Truly cubic and
/// quartic terms of the X-Z energy are dropped; repeated-index ones are kept.
QuboProblem build_qubo(const TripletOracles& oracles, const Permutation& p_xy, const Permutation& p_yz,
                       const CycleBatch& batch_x, const CycleBatch& batch_y, const QuboBuildOptions& options = {});

}  // namespace cyclematch
