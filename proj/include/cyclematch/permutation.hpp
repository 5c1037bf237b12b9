#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cyclematch {

// Bijection on vertex indices; as a 0/1 matrix, row v has its one in column
// target(v). Matrix products compose as (P Q)(v) = Q(P(v)).
class Permutation {
public:
  Permutation() = default;
  /// Throws ParameterError unless `map` is a bijection on [0, n).
  explicit Permutation(std::vector<int> map);

  static Permutation identity(int n);
  static Permutation random(int n, std::uint64_t seed);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int v) const { return map_[v]; }
  std::span<const int> map() const { return map_; }

  Permutation inverse() const;
  /// Matrix product this * other: v -> other(this(v)).
  Permutation then(const Permutation& other) const;
  /// Swaps the targets of u and v (left-multiplication by the transposition (u v)).
  void swap_rows(int u, int v);

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<int> map_;
};

struct TwoCycle {
  int u = 0;
  int v = 0;
  friend bool operator==(const TwoCycle&, const TwoCycle&) = default;
};

// k pairwise-disjoint transpositions.
class CycleBatch {
public:
  CycleBatch() = default;
  /// Throws ParameterError if two cycles share an index or a cycle is degenerate.
  explicit CycleBatch(std::vector<TwoCycle> cycles);

  int size() const { return static_cast<int>(cycles_.size()); }
  bool empty() const { return cycles_.empty(); }
  const TwoCycle& operator[](int i) const { return cycles_[i]; }
  std::span<const TwoCycle> cycles() const { return cycles_; }

private:
  std::vector<TwoCycle> cycles_;
};

struct CycleFactorization {
  std::vector<CycleBatch> rounds;
};

/// Cyclic alpha-expansion: applies transposition i on the left of P
/// whenever alpha[i] is set.
Permutation cae_apply(const Permutation& p, const CycleBatch& batch, std::span<const std::uint8_t> alpha);

/// Circle-method 1-factorization of the complete graph on `vertex_set`
/// (after a seeded shuffle): m-1 rounds of m/2 disjoint pairs.
CycleFactorization one_factorization(std::span<const int> vertex_set, std::uint64_t seed);

struct RoundPair {
  CycleBatch x;
  CycleBatch y;
};

/// Seeded random bijection between the rounds of two factorizations.
std::vector<RoundPair> pair_rounds(const CycleFactorization& fx, const CycleFactorization& fy, std::uint64_t seed);

void save_permutation(const Permutation& p, const std::filesystem::path& path);
Permutation load_permutation(const std::filesystem::path& path);

}  // namespace cyclematch
