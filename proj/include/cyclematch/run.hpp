#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyclematch/eval.hpp"
#include "cyclematch/pipeline.hpp"

namespace cyclematch {

// Contents of a run configuration file (JSON). Relative paths are resolved
// against the directory containing the file.
struct RunConfig {
  std::vector<std::filesystem::path> shapes;
  std::vector<std::filesystem::path> side_labels;  // empty or one per shape
  int t = 11;
  double worst_fraction = 0.16;
  std::uint64_t seed = 0;
  std::string backend = "sa";
  SolveRequest solve;
  bool monotone_guard = false;
  bool strict_rebuild = true;
  bool kernelize = true;
  std::string init = "hks";  // "hks" or "identity"
  HksParams hks;
  std::filesystem::path output_dir = "out";
};

RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& config);

std::vector<ShapeData> load_shapes(const std::vector<std::filesystem::path>& meshes,
                                   const std::vector<std::filesystem::path>& side_labels);

/// Runs the matcher and writes shape<I>_to_anchor.txt, energy_log.csv and
/// summary.json into config.output_dir.
MatchResult run_match(const RunConfig& config);

void write_energy_log(const std::vector<EnergyLogRow>& log, const std::filesystem::path& path);

/// Writes pck.csv and summary.json for a pooled set of per-vertex errors.
void write_eval_report(const EvalReport& report, int n, int num_pairs, const std::filesystem::path& dir);

}  // namespace cyclematch
