#include "cyclematch/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cyclematch/error.hpp"

namespace cyclematch {

QuboProblem::QuboProblem(int num_vars, double constant)
    : n_(num_vars), constant_(constant), w_(static_cast<std::size_t>(num_vars) * num_vars, 0.0), original_n_(num_vars) {
  if (num_vars < 0) throw ParameterError("negative variable count");
  variables_.resize(num_vars);
  std::iota(variables_.begin(), variables_.end(), 0);
}

void QuboProblem::add_coupling(int i, int j, double c) {
  if (i == j) throw ParameterError("coupling on the diagonal");
  w_[static_cast<std::size_t>(i) * n_ + j] += 0.5 * c;
  w_[static_cast<std::size_t>(j) * n_ + i] += 0.5 * c;
}

double QuboProblem::evaluate(std::span<const std::uint8_t> alpha) const {
  if (alpha.size() != static_cast<std::size_t>(n_)) throw DimensionError("assignment length differs from num_vars");
  double total = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (!alpha[i]) continue;
    const double* row = w_.data() + static_cast<std::size_t>(i) * n_;
    for (int j = 0; j < n_; ++j) {
      if (alpha[j]) total += row[j];
    }
  }
  return total;
}

std::vector<std::uint8_t> QuboProblem::expand(std::span<const std::uint8_t> alpha) const {
  if (alpha.size() != static_cast<std::size_t>(n_)) throw DimensionError("assignment length differs from num_vars");
  std::vector<std::uint8_t> full(original_n_, 0);
  for (const auto& [var, bit] : fixed_) full[var] = bit;
  for (int i = 0; i < n_; ++i) full[variables_[i]] = alpha[i];
  return full;
}

double QuboProblem::max_abs_weight() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) m = std::max(m, std::abs(i == j ? weight(i, i) : 2.0 * weight(i, j)));
  }
  return m;
}

double QuboProblem::mean_abs_weight() const {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      const double c = std::abs(i == j ? weight(i, i) : 2.0 * weight(i, j));
      if (c > 0.0) {
        sum += c;
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

QuboProblem kernelize(const QuboProblem& q) {
  const int n = q.n_;
  std::vector<double> linear(n);
  for (int i = 0; i < n; ++i) linear[i] = q.weight(i, i);
  std::vector<char> free(n, 1);
  std::vector<std::pair<int, std::uint8_t>> fixed = q.fixed_;
  double constant = q.constant_;

  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      if (!free[v]) continue;
      double coupling = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i != v && free[i]) coupling += 2.0 * std::abs(q.weight(v, i));
      }
      const double b = linear[v];
      if (std::abs(b) < coupling) continue;
      const std::uint8_t bit = b < 0.0 ? 1 : 0;
      free[v] = 0;
      fixed.emplace_back(q.variables_[v], bit);
      if (bit) {
        constant += b;
        for (int i = 0; i < n; ++i) {
          if (free[i]) linear[i] += 2.0 * q.weight(v, i);
        }
      }
      changed = true;
    }
  }

  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (free[i]) keep.push_back(i);
  }
  QuboProblem out(static_cast<int>(keep.size()), constant);
  out.original_n_ = q.original_n_;
  out.fixed_ = std::move(fixed);
  std::sort(out.fixed_.begin(), out.fixed_.end());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    out.variables_[a] = q.variables_[keep[a]];
    for (std::size_t b = 0; b < keep.size(); ++b) {
      out.w_[a * keep.size() + b] = a == b ? linear[keep[a]] : q.weight(keep[a], keep[b]);
    }
  }
  return out;
}

nlohmann::json qubo_entries(const QuboProblem& q) {
  auto entries = nlohmann::json::array();
  for (int i = 0; i < q.num_vars(); ++i) {
    for (int j = i; j < q.num_vars(); ++j) {
      const double w = i == j ? q.weight(i, i) : 2.0 * q.weight(i, j);
      if (w != 0.0) entries.push_back({i, j, w});
    }
  }
  return entries;
}

nlohmann::json qubo_to_json(const QuboProblem& q) {
  return {{"num_vars", q.num_vars()}, {"constant", q.constant()}, {"entries", qubo_entries(q)}};
}

QuboProblem qubo_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ProtocolError("QUBO document must be a JSON object");
    const int n = doc.at("num_vars").get<int>();
    if (n < 0) throw ProtocolError("num_vars must be non-negative");
    QuboProblem q(n, doc.value("constant", 0.0));
    for (const auto& e : doc.at("entries")) {
      if (!e.is_array() || e.size() != 3) throw ProtocolError("QUBO entry must be [i, j, w]");
      const int i = e[0].get<int>();
      const int j = e[1].get<int>();
      const double w = e[2].get<double>();
      if (i < 0 || j < 0 || i >= n || j >= n) throw ProtocolError("QUBO entry index out of range");
      if (!std::isfinite(w)) throw ProtocolError("QUBO weight is not finite");
      q.add_term(i, j, w);
    }
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed QUBO document: ") + e.what());
  }
}

QuboProblem build_qubo(const TripletOracles& oracles, const Permutation& p_xy, const Permutation& p_yz,
                       const CycleBatch& batch_x, const CycleBatch& batch_y, const QuboBuildOptions& options) {
  if (batch_x.size() != batch_y.size()) {
    throw DimensionError("cycle batches differ in size: " + std::to_string(batch_x.size()) + " vs " +
                         std::to_string(batch_y.size()));
  }
  const int k = batch_x.size();
  const auto& exy = oracles.xy;
  const auto& eyz = oracles.yz;
  const auto& exz = oracles.xz;
  const Permutation p_xz = p_xy.then(p_yz);

  // C_i = (c_i - I) P_XY and its X-Z image C_i P_YZ; likewise for the Y side.
  std::vector<SparseMatrix> c(k), c_xz(k), ct(k), ct_xz(k);
  for (int i = 0; i < k; ++i) {
    c[i] = SparseMatrix::cycle_update(batch_x[i], p_xy);
    c_xz[i] = c[i].right_multiplied(p_yz);
    ct[i] = SparseMatrix::cycle_update(batch_y[i], p_yz);
    ct_xz[i] = ct[i].left_multiplied(p_xy);
  }

  QuboProblem q(2 * k);
  if (options.compute_constant) q.set_constant(energy(exy, p_xy) + energy(eyz, p_yz) + energy(exz, p_xz));

  for (int i = 0; i < k; ++i) {
    q.add_linear(i, energy_sym(exy, p_xy, c[i]) + energy_pair(exy, c[i], c[i]) + energy_sym(exz, p_xz, c_xz[i]) +
                        energy_pair(exz, c_xz[i], c_xz[i]));
    q.add_linear(k + i, energy_sym(eyz, p_yz, ct[i]) + energy_pair(eyz, ct[i], ct[i]) +
                            energy_sym(exz, p_xz, ct_xz[i]) + energy_pair(exz, ct_xz[i], ct_xz[i]));
  }
  for (int i = 0; i < k; ++i) {
    for (int l = i + 1; l < k; ++l) {
      q.add_coupling(i, l, energy_sym(exy, c[i], c[l]) + energy_sym(exz, c_xz[i], c_xz[l]));
      q.add_coupling(k + i, k + l, energy_sym(eyz, ct[i], ct[l]) + energy_sym(exz, ct_xz[i], ct_xz[l]));
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double coupling = energy_sym(exz, ct_xz[j], c_xz[i]);
      const SparseMatrix kij = c[i] * ct[j];
      if (kij.nonzeros() > 0) {
        coupling += energy_sym(exz, kij, p_xz) + energy_sym(exz, kij, ct_xz[j]) + energy_sym(exz, kij, c_xz[i]) +
                    energy_pair(exz, kij, kij);
      }
      q.add_coupling(i, k + j, coupling);
    }
  }
  return q;
}

}  // namespace cyclematch
