#include "cyclematch/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cyclematch/error.hpp"
#include "cyclematch/rng.hpp"

namespace cyclematch {

Schedule::Schedule(int t, int num_shapes) : t_(t), num_shapes_(num_shapes) {
  if (t < 1) throw ParameterError("schedule parameter T must be at least 1");
  if (num_shapes < 3) throw ParameterError("matching needs at least 3 shapes, got " + std::to_string(num_shapes));
  // rho(s) = c2 exp(c1 / s), s = 1..T: rho(1) = start, rho(T) = end.
  if (t == 1) {
    c1_ = 0.0;
    c2_ = kRhoStartFraction;
  } else {
    c1_ = std::log(kRhoStartFraction / kRhoEndFraction) * t / (t - 1.0);
    c2_ = kRhoStartFraction * std::exp(-c1_);
  }
}

FieldMode Schedule::mode(int iteration) const {
  return iteration < geodesic_iterations() ? FieldMode::Geodesic : FieldMode::Gaussian;
}

int Schedule::gaussian_step(int iteration) const {
  if (iteration < geodesic_iterations() || iteration >= total_iterations()) {
    throw ParameterError("iteration " + std::to_string(iteration) + " is not in the Gaussian phase");
  }
  return (iteration - geodesic_iterations()) / (num_shapes_ - 1);
}

double rho_at(const Schedule& schedule, int iteration) {
  const int s = schedule.gaussian_step(iteration) + 1;
  return schedule.c2() * std::exp(schedule.c1() / s);
}

double triplet_energy(const TripletSlice& slice, const TripletOracles& oracles) {
  return energy(oracles.xy, slice.p_xy) + energy(oracles.yz, slice.p_yz) + energy(oracles.xz, slice.p_xz);
}

int worst_count(int n, double fraction) {
  if (!(fraction >= 0.0)) throw ParameterError("worst-vertex fraction must be non-negative");
  int m = static_cast<int>(std::floor(fraction * n));
  m = std::min(m, n);
  return m - (m % 2);
}

TripletSlice three_shape_step(const TripletSlice& slice, const TripletOracles& oracles, int m, std::uint64_t seed,
                              const QuboSolver& solver, const StepOptions& options) {
  const int n = slice.p_xy.size();
  if (slice.p_xz != slice.p_xy.then(slice.p_yz)) throw ParameterError("triplet slice is not cycle consistent");
  if (m % 2 != 0 || m > n) throw ParameterError("invalid worst-vertex count " + std::to_string(m));
  TripletSlice live = slice;
  if (m < 2) return live;

  for (std::uint64_t source = 0; source < 3; ++source) {
    std::vector<int> vx;
    std::vector<int> vy;
    if (source == 1) {
      vy = worst_vertices(live.p_yz, oracles.yz, m);
      const Permutation inv = live.p_xy.inverse();
      for (int y : vy) vx.push_back(inv(y));
    } else {
      vx = worst_vertices(source == 0 ? live.p_xy : live.p_xz, source == 0 ? oracles.xy : oracles.xz, m);
      for (int x : vx) vy.push_back(live.p_xy(x));
    }
    const auto fx = one_factorization(vx, derive_seed(seed, {source, 0}));
    const auto fy = one_factorization(vy, derive_seed(seed, {source, 1}));
    const auto rounds = pair_rounds(fx, fy, derive_seed(seed, {source, 2}));

    const TripletSlice snapshot = live;
    for (std::size_t r = 0; r < rounds.size(); ++r) {
      const auto& [bx, by] = rounds[r];
      const TripletSlice& base = options.strict_rebuild ? live : snapshot;
      const QuboProblem q = build_qubo(oracles, base.p_xy, base.p_yz, bx, by, {.compute_constant = false});
      const QuboProblem reduced = options.kernelize ? kernelize(q) : q;
      std::vector<std::uint8_t> bits;
      if (reduced.num_vars() == 0) {
        bits = reduced.expand({});
      } else {
        SolveRequest request = options.request;
        request.seed = derive_seed(seed, {source, 3, r});
        bits = reduced.expand(solver(reduced, request).best_assignment);
      }
      if (q.evaluate(bits) > 0.0) std::fill(bits.begin(), bits.end(), 0);
      const int k = bx.size();
      live.p_xy = cae_apply(live.p_xy, bx, std::span(bits).first(k));
      live.p_yz = cae_apply(live.p_yz, by, std::span(bits).subspan(k));
    }
    live.p_xz = live.p_xy.then(live.p_yz);
  }
  return live;
}

const TripletSlice& monotone_guard(const TripletSlice& before, const TripletSlice& after, const TripletOracles& oracles,
                                   bool enabled) {
  if (!enabled) return after;
  return triplet_energy(after, oracles) > triplet_energy(before, oracles) ? before : after;
}

ShapeData prepare_shape(Mesh mesh) {
  GeodesicField geo = geodesic_all_pairs(mesh);
  return {std::move(mesh), std::move(geo)};
}

Permutation MatchingState::derived(int from, int to) const {
  return to_anchor.at(from).then(to_anchor.at(to).inverse());
}

double anchor_energy(const std::vector<ShapeData>& shapes, const MatchingState& state) {
  double total = 0.0;
  for (int i = 0; i < state.num_shapes(); ++i) {
    if (i == state.anchor) continue;
    total += energy(EnergyOracle(shapes[i].geodesic, shapes[state.anchor].geodesic), state.to_anchor[i]);
  }
  return total;
}

MatchResult match_collection(const std::vector<ShapeData>& shapes, const MatchConfig& config, const MatchObserver& observer) {
  const int count = static_cast<int>(shapes.size());
  if (count < 3) throw ParameterError("matching needs at least 3 shapes, got " + std::to_string(count));
  const int n = shapes.front().geodesic.size();
  for (const auto& s : shapes) {
    if (s.geodesic.size() != n) throw DimensionError("all shapes must have the same vertex count");
  }
  const Schedule schedule(config.t, count);
  const int m = config.worst_vertices.value_or(worst_count(n, config.worst_fraction));
  const QuboSolver solver = config.solver ? config.solver : make_solver("sa");

  std::vector<GeodesicField> fields;
  fields.reserve(shapes.size());
  for (const auto& s : shapes) fields.push_back(s.geodesic);

  std::vector<std::vector<Permutation>> inits;
  switch (config.init) {
    case InitMode::Hks: {
      std::vector<DescriptorSet> descriptors;
      for (const auto& s : shapes) descriptors.push_back(hks(s.mesh, config.hks));
      inits = all_pairs_init(descriptors);
      break;
    }
    case InitMode::Identity:
      inits.assign(count, std::vector<Permutation>(count, Permutation::identity(n)));
      break;
    case InitMode::Provided:
      inits = config.initial_perms;
      if (inits.size() != shapes.size()) throw DimensionError("initial permutation table does not match shape count");
      break;
  }

  MatchResult result;
  MatchingState& state = result.state;
  state.anchor = select_anchor(fields, inits);
  for (int i = 0; i < count; ++i) {
    state.to_anchor.push_back(i == state.anchor ? Permutation::identity(n) : inits[i][state.anchor]);
  }

  std::vector<double> pair_energy(count, 0.0);
  auto refresh_pair_energy = [&](int i) {
    pair_energy[i] = i == state.anchor ? 0.0 : energy(EnergyOracle(fields[i], fields[state.anchor]), state.to_anchor[i]);
  };
  for (int i = 0; i < count; ++i) refresh_pair_energy(i);
  auto total_energy = [&] {
    double total = 0.0;
    for (double e : pair_energy) total += e;
    return total;
  };
  result.initial_energy = total_energy();

  std::vector<int> others;
  for (int i = 0; i < count; ++i) {
    if (i != state.anchor) others.push_back(i);
  }
  Rng order_rng(derive_seed(config.seed, {0x7472697073ULL}));
  auto pick = [&](const std::vector<int>& from) {
    return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(order_rng)];
  };
  int previous = pick(others);
  std::vector<int> pool;

  for (int it = 0; it < schedule.total_iterations(); ++it) {
    const auto start = std::chrono::steady_clock::now();
    if (it % (count - 1) == 0) pool = others;
    // Never pick the previous shape again right after a refill, so X != Z.
    std::vector<int> candidates = pool;
    if (candidates.size() > 1) std::erase(candidates, previous);
    const int x = pick(candidates);
    std::erase(pool, x);
    const int z = previous;
    const int a = state.anchor;

    TripletSlice slice{state.to_anchor[x], state.to_anchor[z].inverse(), {}};
    slice.p_xz = slice.p_xy.then(slice.p_yz);

    const FieldMode mode = schedule.mode(it);
    double rho_fraction = 0.0;
    KernelField kx, ka, kz;
    const FieldMatrix* fx = &fields[x].dist;
    const FieldMatrix* fa = &fields[a].dist;
    const FieldMatrix* fz = &fields[z].dist;
    if (mode == FieldMode::Gaussian) {
      rho_fraction = rho_at(schedule, it);
      kx = gaussian_field(fields[x], rho_fraction * fields[x].diameter);
      ka = gaussian_field(fields[a], rho_fraction * fields[a].diameter);
      kz = gaussian_field(fields[z], rho_fraction * fields[z].diameter);
      fx = &kx.values;
      fa = &ka.values;
      fz = &kz.values;
    }
    const TripletOracles oracles{EnergyOracle(*fx, *fa, mode), EnergyOracle(*fa, *fz, mode), EnergyOracle(*fx, *fz, mode)};

    const TripletSlice after = three_shape_step(slice, oracles, m, derive_seed(config.seed, {static_cast<std::uint64_t>(it)}),
                                                solver, config.step);
    const TripletSlice& accepted = monotone_guard(slice, after, oracles, config.monotone_guard);

    EnergyLogRow row;
    row.iteration = it;
    row.mode = mode;
    row.shape_x = x;
    row.shape_z = z;
    row.rho_fraction = rho_fraction;
    row.triplet_before = triplet_energy(slice, oracles);
    row.triplet_after = triplet_energy(accepted, oracles);
    row.reverted = &accepted == &slice && after != slice;

    state.to_anchor[x] = accepted.p_xy;
    state.to_anchor[z] = accepted.p_yz.inverse();
    state.iteration = it + 1;
    refresh_pair_energy(x);
    refresh_pair_energy(z);
    row.energy = total_energy();
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(row);
    if (observer) observer(state, row);
    previous = x;
  }
  return result;
}

}  // namespace cyclematch
