#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyclematch/qubo.hpp"

namespace cyclematch {

struct AnnealParams {
  int sweeps = 100;
  // Unset bounds default to 0.1 / max|w| and 10 / mean|w|.
  std::optional<double> beta_min;
  std::optional<double> beta_max;
};

struct SolveRequest {
  int num_reads = 200;
  std::uint64_t seed = 0;
  AnnealParams anneal;
};

struct Sample {
  std::vector<std::uint8_t> bits;
  double energy = 0.0;
};

// Energies exclude the problem constant.
struct SolveResult {
  std::vector<std::uint8_t> best_assignment;
  double best_energy = 0.0;
  std::vector<Sample> samples;
};

inline constexpr int kMaxExactVars = 24;

/// Exhaustive enumeration; ties go to the lexicographically smallest assignment.
SolveResult solve_exact(const QuboProblem& problem);

/// Single-flip Metropolis simulated annealing with a geometric inverse
/// temperature schedule, one independent restart per read.
SolveResult solve_sa(const QuboProblem& problem, const SolveRequest& request);

/// Runs `command` through /bin/sh, writes one request line to its stdin and
/// reads one result line from its stdout.
SolveResult solve_external(const QuboProblem& problem, const SolveRequest& request, const std::string& command);

nlohmann::json make_request_json(const QuboProblem& problem, const SolveRequest& request);
nlohmann::json result_to_json(const SolveResult& result);
/// Parses and validates a response line against `problem`.
SolveResult parse_result_line(const QuboProblem& problem, const std::string& line);

using QuboSolver = std::function<SolveResult(const QuboProblem&, const SolveRequest&)>;

/// "exact", "sa" or "external:<command>".
QuboSolver make_solver(const std::string& backend);

}  // namespace cyclematch
