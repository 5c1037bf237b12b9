#include "cyclematch/solvers.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "cyclematch/error.hpp"
#include "cyclematch/rng.hpp"

namespace cyclematch {
namespace {

// Local fields h_i = sum_{j != i} W_ij alpha_j; flipping i changes the energy
// by +-(W_ii + 2 h_i).
class FlipState {
public:
  explicit FlipState(const QuboProblem& q) : q_(q), n_(q.num_vars()), bits_(n_, 0), field_(n_, 0.0) {}

  void assign(const std::vector<std::uint8_t>& bits) {
    bits_ = bits;
    std::fill(field_.begin(), field_.end(), 0.0);
    energy_ = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (j != i && bits_[j]) field_[i] += q_.weight(i, j);
      }
    }
    energy_ = q_.evaluate(bits_);
  }

  double delta(int i) const {
    const double d = q_.weight(i, i) + 2.0 * field_[i];
    return bits_[i] ? -d : d;
  }

  void flip(int i) {
    energy_ += delta(i);
    bits_[i] ^= 1;
    const double sign = bits_[i] ? 1.0 : -1.0;
    for (int j = 0; j < n_; ++j) {
      if (j != i) field_[j] += sign * q_.weight(j, i);
    }
  }

  double energy() const { return energy_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

private:
  const QuboProblem& q_;
  int n_;
  std::vector<std::uint8_t> bits_;
  std::vector<double> field_;
  double energy_ = 0.0;
};

SolveResult finalize(const QuboProblem& problem, std::vector<Sample> samples) {
  SolveResult result;
  result.samples = std::move(samples);
  result.best_energy = std::numeric_limits<double>::infinity();
  for (const auto& s : result.samples) {
    if (s.energy < result.best_energy) {
      result.best_energy = s.energy;
      result.best_assignment = s.bits;
    }
  }
  if (result.samples.empty()) {
    result.best_assignment.assign(problem.num_vars(), 0);
    result.best_energy = 0.0;
  }
  return result;
}

}  // namespace

SolveResult solve_exact(const QuboProblem& problem) {
  const int n = problem.num_vars();
  if (n > kMaxExactVars) {
    throw SolverError("exact solver limited to " + std::to_string(kMaxExactVars) + " variables, got " + std::to_string(n));
  }
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) scale += std::abs(problem.weight(i, j));
  }
  const double tie_tol = 1e-12 * scale;

  // Counting with alpha_0 as the most significant bit visits assignments in
  // lexicographic order, so the first strict improvement wins ties.
  FlipState state(problem);
  state.assign(std::vector<std::uint8_t>(n, 0));
  std::vector<std::uint8_t> best = state.bits();
  double best_energy = state.energy();
  const std::uint64_t total = n == 0 ? 1 : (std::uint64_t{1} << n);
  for (std::uint64_t x = 1; x < total; ++x) {
    const std::uint64_t changed = x ^ (x - 1);
    for (int bit = 0; bit < n; ++bit) {
      if (changed & (std::uint64_t{1} << bit)) state.flip(n - 1 - bit);
    }
    if (state.energy() < best_energy - tie_tol) {
      best_energy = state.energy();
      best = state.bits();
    }
  }
  Sample s{best, problem.evaluate(best)};
  return finalize(problem, {s});
}

SolveResult solve_sa(const QuboProblem& problem, const SolveRequest& request) {
  if (request.num_reads < 1) throw ParameterError("num_reads must be at least 1");
  if (request.anneal.sweeps < 1) throw ParameterError("sweeps must be at least 1");
  const int n = problem.num_vars();
  const double wmax = problem.max_abs_weight();
  const double wmean = problem.mean_abs_weight();
  const double beta_min = request.anneal.beta_min.value_or(wmax > 0.0 ? 0.1 / wmax : 1.0);
  const double beta_max = request.anneal.beta_max.value_or(wmean > 0.0 ? 10.0 / wmean : 1.0);
  if (!(beta_min > 0.0) || !(beta_max > 0.0)) throw ParameterError("inverse temperatures must be positive");
  const int sweeps = request.anneal.sweeps;
  const double ratio = sweeps > 1 ? std::pow(beta_max / beta_min, 1.0 / (sweeps - 1)) : 1.0;

  std::vector<Sample> samples;
  samples.reserve(request.num_reads);
  FlipState state(problem);
  for (int read = 0; read < request.num_reads; ++read) {
    Rng rng(derive_seed(request.seed, {static_cast<std::uint64_t>(read)}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint8_t> init(n);
    for (auto& b : init) b = static_cast<std::uint8_t>(rng() & 1U);
    state.assign(init);
    std::vector<std::uint8_t> best = state.bits();
    double best_energy = state.energy();

    double beta = beta_min;
    for (int sweep = 0; sweep < sweeps; ++sweep, beta *= ratio) {
      for (int i = 0; i < n; ++i) {
        const double d = state.delta(i);
        if (d <= 0.0 || unit(rng) < std::exp(-beta * d)) {
          state.flip(i);
          if (state.energy() < best_energy) {
            best_energy = state.energy();
            best = state.bits();
          }
        }
      }
    }
    // The all-zero assignment (no update) is always a candidate.
    double energy = problem.evaluate(best);
    if (energy > 0.0) {
      best.assign(n, 0);
      energy = 0.0;
    }
    samples.push_back({std::move(best), energy});
  }
  return finalize(problem, std::move(samples));
}

nlohmann::json make_request_json(const QuboProblem& problem, const SolveRequest& request) {
  return {{"num_vars", problem.num_vars()},
          {"entries", qubo_entries(problem)},
          {"num_reads", request.num_reads},
          {"seed", request.seed}};
}

nlohmann::json result_to_json(const SolveResult& result) {
  auto samples = nlohmann::json::array();
  for (const auto& s : result.samples) {
    std::vector<int> bits(s.bits.begin(), s.bits.end());
    samples.push_back({{"bits", bits}, {"energy", s.energy}});
  }
  std::vector<int> best(result.best_assignment.begin(), result.best_assignment.end());
  return {{"samples", samples}, {"best", {{"bits", best}, {"energy", result.best_energy}}}};
}

SolveResult parse_result_line(const QuboProblem& problem, const std::string& line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed JSON from solver: '" + line + "' (" + e.what() + ")");
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw ProtocolError("solver response lacks a samples array: '" + line + "'");
  }
  std::vector<Sample> samples;
  for (const auto& s : doc["samples"]) {
    if (!s.is_object() || !s.contains("bits") || !s.contains("energy") || !s["bits"].is_array() ||
        !s["energy"].is_number()) {
      throw ProtocolError("solver sample must be {\"bits\": [...], \"energy\": e}");
    }
    if (s["bits"].size() != static_cast<std::size_t>(problem.num_vars())) {
      throw ProtocolError("solver returned " + std::to_string(s["bits"].size()) + " bits for " +
                          std::to_string(problem.num_vars()) + " variables");
    }
    Sample sample;
    for (const auto& b : s["bits"]) {
      if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) throw ProtocolError("solver bits must be 0 or 1");
      sample.bits.push_back(static_cast<std::uint8_t>(b.get<int>()));
    }
    sample.energy = s["energy"].get<double>();
    const double direct = problem.evaluate(sample.bits);
    if (std::abs(direct - sample.energy) > 1e-6 * std::max(1.0, std::abs(direct))) {
      throw EnergyMismatchError("solver reported energy " + std::to_string(sample.energy) + " but the assignment evaluates to " +
                                std::to_string(direct));
    }
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) throw ProtocolError("solver returned no samples");
  return finalize(problem, std::move(samples));
}

SolveResult solve_external(const QuboProblem& problem, const SolveRequest& request, const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0) throw SolverError(std::string("pipe failed: ") + std::strerror(errno));
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw SolverError(std::string("pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) throw SolverError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);

  // A child that exits early must not kill us with SIGPIPE.
  struct sigaction ignore {}, previous {};
  ignore.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &ignore, &previous);
  const std::string request_line = make_request_json(problem, request).dump() + "\n";
  std::size_t written = 0;
  while (written < request_line.size()) {
    const ssize_t w = write(to_child[1], request_line.data() + written, request_line.size() - written);
    if (w < 0) {
      if (errno == EINTR) continue;
      break;
    }
    written += static_cast<std::size_t>(w);
  }
  close(to_child[1]);
  sigaction(SIGPIPE, &previous, nullptr);

  std::string output;
  char buffer[4096];
  while (true) {
    const ssize_t r = read(from_child[0], buffer, sizeof buffer);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    output.append(buffer, static_cast<std::size_t>(r));
  }
  close(from_child[0]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && output.empty()) {
    throw SolverError("could not launch external solver: " + command);
  }
  if (written < request_line.size() && output.empty()) {
    throw SolverError("external solver closed its input early: " + command);
  }
  const auto eol = output.find('\n');
  const std::string line = output.substr(0, eol);
  if (line.empty()) throw ProtocolError("external solver produced no output: " + command);
  return parse_result_line(problem, line);
}

QuboSolver make_solver(const std::string& backend) {
  if (backend == "exact") return [](const QuboProblem& q, const SolveRequest&) { return solve_exact(q); };
  if (backend == "sa") return [](const QuboProblem& q, const SolveRequest& r) { return solve_sa(q, r); };
  const std::string prefix = "external:";
  if (backend.rfind(prefix, 0) == 0 && backend.size() > prefix.size()) {
    std::string command = backend.substr(prefix.size());
    return [command](const QuboProblem& q, const SolveRequest& r) { return solve_external(q, r, command); };
  }
  throw ParameterError("unknown backend '" + backend + "' (expected exact, sa or external:<command>)");
}

}  // namespace cyclematch
