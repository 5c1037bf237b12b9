#include "cyclematch/permutation.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "cyclematch/error.hpp"
#include "cyclematch/rng.hpp"

namespace cyclematch {

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
  const int n = size();
  std::vector<char> seen(map_.size(), 0);
  for (int t : map_) {
    if (t < 0 || t >= n || seen[t]) throw ParameterError("permutation is not a bijection on [0, " + std::to_string(n) + ")");
    seen[t] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> map(n);
  std::iota(map.begin(), map.end(), 0);
  return Permutation(std::move(map));
}

Permutation Permutation::random(int n, std::uint64_t seed) {
  std::vector<int> map(n);
  std::iota(map.begin(), map.end(), 0);
  Rng rng(seed);
  std::shuffle(map.begin(), map.end(), rng);
  return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.map_.resize(map_.size());
  for (int v = 0; v < size(); ++v) inv.map_[map_[v]] = v;
  return inv;
}

Permutation Permutation::then(const Permutation& other) const {
  if (other.size() != size()) throw DimensionError("permutation sizes differ");
  Permutation out;
  out.map_.resize(map_.size());
  for (int v = 0; v < size(); ++v) out.map_[v] = other.map_[map_[v]];
  return out;
}

void Permutation::swap_rows(int u, int v) { std::swap(map_[u], map_[v]); }

CycleBatch::CycleBatch(std::vector<TwoCycle> cycles) : cycles_(std::move(cycles)) {
  std::vector<int> indices;
  indices.reserve(cycles_.size() * 2);
  for (const auto& c : cycles_) {
    if (c.u == c.v) throw ParameterError("2-cycle with identical endpoints");
    if (c.u < 0 || c.v < 0) throw ParameterError("negative vertex index in 2-cycle");
    indices.push_back(c.u);
    indices.push_back(c.v);
  }
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw ParameterError("cycle batch is not disjoint");
  }
}

Permutation cae_apply(const Permutation& p, const CycleBatch& batch, std::span<const std::uint8_t> alpha) {
  if (alpha.size() != static_cast<std::size_t>(batch.size())) throw DimensionError("alpha length differs from batch size");
  Permutation out = p;
  for (int i = 0; i < batch.size(); ++i) {
    if (!alpha[i]) continue;
    const auto& c = batch[i];
    if (c.u >= p.size() || c.v >= p.size()) throw DimensionError("2-cycle index outside permutation");
    out.swap_rows(c.u, c.v);
  }
  return out;
}

CycleFactorization one_factorization(std::span<const int> vertex_set, std::uint64_t seed) {
  const int m = static_cast<int>(vertex_set.size());
  if (m < 2 || m % 2 != 0) throw ParameterError("1-factorization needs an even vertex count >= 2, got " + std::to_string(m));
  std::vector<int> order(vertex_set.begin(), vertex_set.end());
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  // Circle method: order[m-1] stays fixed, the rest rotate.
  CycleFactorization fx;
  fx.rounds.reserve(m - 1);
  const int ring = m - 1;
  for (int r = 0; r < ring; ++r) {
    std::vector<TwoCycle> pairs;
    pairs.reserve(m / 2);
    pairs.push_back({order[r], order[m - 1]});
    for (int s = 1; s < m / 2; ++s) pairs.push_back({order[(r + s) % ring], order[(r - s + ring) % ring]});
    fx.rounds.emplace_back(std::move(pairs));
  }
  return fx;
}

std::vector<RoundPair> pair_rounds(const CycleFactorization& fx, const CycleFactorization& fy, std::uint64_t seed) {
  if (fx.rounds.size() != fy.rounds.size()) throw DimensionError("factorizations have different round counts");
  std::vector<std::size_t> match(fy.rounds.size());
  std::iota(match.begin(), match.end(), 0);
  Rng rng(seed);
  std::shuffle(match.begin(), match.end(), rng);
  std::vector<RoundPair> out;
  out.reserve(match.size());
  for (std::size_t r = 0; r < match.size(); ++r) out.push_back({fx.rounds[r], fy.rounds[match[r]]});
  return out;
}

void save_permutation(const Permutation& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (int t : p.map()) out << t << '\n';
}

Permutation load_permutation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<int> map;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long v = -1;
    std::string rest;
    if (!(ls >> v) || (ls >> rest)) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected one index");
    map.push_back(static_cast<int>(v));
  }
  try {
    return Permutation(std::move(map));
  } catch (const ParameterError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace cyclematch
