#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cyclematch/descriptors.hpp"
#include "cyclematch/energy.hpp"
#include "cyclematch/geodesic.hpp"
#include "cyclematch/mesh.hpp"
#include "cyclematch/permutation.hpp"
#include "cyclematch/qubo.hpp"
#include "cyclematch/solvers.hpp"

namespace cyclematch {

// Geodesic iterations first, then Gaussian ones with a bandwidth that shrinks
// from 25% to 5% of the shape diameter, stepping once every N-1 iterations.
class Schedule {
public:
  Schedule(int t, int num_shapes);

  int t() const { return t_; }
  int num_shapes() const { return num_shapes_; }
  int total_iterations() const { return 2 * t_ * (num_shapes_ - 1); }
  int geodesic_iterations() const { return t_ * (num_shapes_ - 1); }
  FieldMode mode(int iteration) const;
  /// Index of the bandwidth step (0 .. T-1) of a Gaussian-phase iteration.
  int gaussian_step(int iteration) const;

  // rho(s) = c2 exp(c1 / s) for s = 1..T, with c1, c2 fixed by the endpoints.
  double c1() const { return c1_; }
  double c2() const { return c2_; }

private:
  int t_;
  int num_shapes_;
  double c1_;
  double c2_;
};

inline constexpr double kRhoStartFraction = 0.25;
inline constexpr double kRhoEndFraction = 0.05;

/// Gaussian bandwidth of `iteration` as a fraction of the shape diameter.
/// Throws ParameterError for geodesic-phase or out-of-range iterations.
double rho_at(const Schedule& schedule, int iteration);

struct TripletSlice {
  Permutation p_xy;
  Permutation p_yz;
  Permutation p_xz;

  friend bool operator==(const TripletSlice&, const TripletSlice&) = default;
};

double triplet_energy(const TripletSlice& slice, const TripletOracles& oracles);

struct StepOptions {
  SolveRequest request;
  bool strict_rebuild = true;
  bool kernelize = true;
};

/// One iteration of the three-shape algorithm: three sub-iterations seeded by
/// the X-Y, Y-Z and X-Z inconsistencies, each running m-1 QUBO updates over
/// paired rounds of disjoint transpositions. Requires p_xz == p_xy p_yz and
/// restores it on exit.
TripletSlice three_shape_step(const TripletSlice& slice, const TripletOracles& oracles, int m, std::uint64_t seed,
                              const QuboSolver& solver, const StepOptions& options = {});

/// With the guard on, returns `before` if the three-pair energy increased.
const TripletSlice& monotone_guard(const TripletSlice& before, const TripletSlice& after, const TripletOracles& oracles,
                                   bool enabled);

/// Largest even m <= fraction * n (and <= n).
int worst_count(int n, double fraction);

struct ShapeData {
  Mesh mesh;
  GeodesicField geodesic;
};

ShapeData prepare_shape(Mesh mesh);

// Permutations into the anchor; every other correspondence is derived from
// them, which makes the whole collection cycle consistent.
struct MatchingState {
  int anchor = 0;
  std::vector<Permutation> to_anchor;  // identity at the anchor itself
  int iteration = 0;

  int num_shapes() const { return static_cast<int>(to_anchor.size()); }
  /// P_IJ = P_IA P_JA^-1.
  Permutation derived(int from, int to) const;
};

struct EnergyLogRow {
  int iteration = 0;
  FieldMode mode = FieldMode::Geodesic;
  double energy = 0.0;  // sum over I != A of the geodesic E_IA(P_IA)
  double seconds = 0.0;
  int shape_x = 0;
  int shape_z = 0;
  double rho_fraction = 0.0;  // 0 in the geodesic phase
  double triplet_before = 0.0;  // three-pair energy under the active fields
  double triplet_after = 0.0;
  bool reverted = false;
};

enum class InitMode { Hks, Identity, Provided };

struct MatchConfig {
  int t = 11;
  double worst_fraction = 0.16;
  std::uint64_t seed = 0;
  QuboSolver solver;  // defaults to simulated annealing
  StepOptions step;
  bool monotone_guard = false;
  InitMode init = InitMode::Hks;
  HksParams hks;
  // For InitMode::Provided: initial_perms[I][J] maps shape I to shape J.
  std::vector<std::vector<Permutation>> initial_perms;
  // Overrides the derived worst-vertex count when set.
  std::optional<int> worst_vertices;
};

struct MatchResult {
  MatchingState state;
  std::vector<EnergyLogRow> log;
  double initial_energy = 0.0;
};

using MatchObserver = std::function<void(const MatchingState&, const EnergyLogRow&)>;

/// Sum over I != A of the geodesic energy E_IA(P_IA).
double anchor_energy(const std::vector<ShapeData>& shapes, const MatchingState& state);

/// Matches N >= 3 shapes with a fixed anchor, updating two anchor
/// permutations per iteration.
MatchResult match_collection(const std::vector<ShapeData>& shapes, const MatchConfig& config,
                             const MatchObserver& observer = {});

}  // namespace cyclematch
