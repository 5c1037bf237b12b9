// Command-line front end: match, eval, solve-qubo, init, perturb.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyclematch/descriptors.hpp"
#include "cyclematch/error.hpp"
#include "cyclematch/eval.hpp"
#include "cyclematch/mesh.hpp"
#include "cyclematch/run.hpp"
#include "cyclematch/solvers.hpp"

namespace fs = std::filesystem;
using namespace cyclematch;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kTopology = 4,
  kParameter = 5,
  kDimension = 6,
  kSolver = 7,
  kProtocol = 8,
  kEnergyMismatch = 9,
  kIo = 10,
};

int cmd_match(const fs::path& config_path) {
  const auto config = load_run_config(config_path);
  const auto result = run_match(config);
  std::cout << "anchor " << result.state.anchor << ", iterations " << result.state.iteration << ", energy "
            << result.initial_energy << " -> " << (result.log.empty() ? result.initial_energy : result.log.back().energy)
            << "\nwrote " << config.output_dir.string() << '\n';
  return kOk;
}

int cmd_eval(const std::vector<std::string>& preds, const std::vector<std::string>& truths,
             const std::vector<std::string>& targets, const fs::path& out_dir) {
  if (preds.size() != truths.size() || preds.size() != targets.size() || preds.empty()) {
    throw ParameterError("eval needs matching --pred, --truth and --target lists");
  }
  std::vector<double> errors;
  int n = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto p = load_permutation(preds[i]);
    const auto p_star = load_permutation(truths[i]);
    const auto geo = geodesic_all_pairs(load_mesh(targets[i]));
    const auto e = geodesic_error(p, p_star, geo);
    errors.insert(errors.end(), e.begin(), e.end());
    n = p.size();
  }
  const auto report = pck_auc(errors);
  write_eval_report(report, n, static_cast<int>(preds.size()), out_dir);
  std::cout << "auc " << report.auc << '\n';
  return kOk;
}

int cmd_eval_group(const std::vector<std::string>& summaries, const fs::path& out_dir) {
  nlohmann::json classes = nlohmann::json::array();
  double sum = 0.0;
  for (const auto& path : summaries) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    if (!doc.contains("auc") || !doc["auc"].is_number()) throw ParseError(path + ": missing auc");
    const double auc = doc["auc"].get<double>();
    sum += auc;
    classes.push_back({{"summary", path}, {"auc", auc}});
  }
  const double mean = sum / static_cast<double>(summaries.size());
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "group_summary.json");
  if (!out) throw IoError("cannot write " + (out_dir / "group_summary.json").string());
  out << nlohmann::json({{"mean_auc", mean}, {"classes", classes}}).dump(2) << '\n';
  std::cout << "mean auc " << mean << '\n';
  return kOk;
}

int cmd_solve(const std::string& problem_path, const std::string& backend, const SolveRequest& request) {
  nlohmann::json doc;
  try {
    if (problem_path == "-") {
      doc = nlohmann::json::parse(std::cin);
    } else {
      std::ifstream in(problem_path);
      if (!in) throw IoError("cannot open " + problem_path);
      doc = nlohmann::json::parse(in);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("QUBO problem: ") + e.what());
  }
  const auto problem = qubo_from_json(doc);
  const auto result = make_solver(backend)(problem, request);
  auto out = result_to_json(result);
  out["constant"] = problem.constant();
  std::cout << out.dump() << '\n';
  return kOk;
}

int cmd_init(const std::vector<std::string>& meshes, const std::vector<std::string>& labels, const HksParams& params,
             const fs::path& out_dir) {
  std::vector<fs::path> mesh_paths(meshes.begin(), meshes.end());
  std::vector<fs::path> label_paths(labels.begin(), labels.end());
  const auto shapes = load_shapes(mesh_paths, label_paths);
  std::vector<DescriptorSet> descriptors;
  std::vector<GeodesicField> fields;
  for (const auto& s : shapes) {
    descriptors.push_back(hks(s.mesh, params));
    fields.push_back(s.geodesic);
  }
  const auto inits = all_pairs_init(descriptors);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    for (std::size_t j = 0; j < shapes.size(); ++j) {
      if (i != j) save_permutation(inits[i][j], out_dir / ("init_" + std::to_string(i) + "_to_" + std::to_string(j) + ".txt"));
    }
  }
  nlohmann::json summary = {{"num_shapes", shapes.size()}};
  if (shapes.size() >= 3) summary["anchor"] = select_anchor(fields, inits);
  std::ofstream out(out_dir / "init_summary.json");
  out << summary.dump(2) << '\n';
  std::cout << "wrote " << out_dir.string() << '\n';
  return kOk;
}

int cmd_perturb(const fs::path& in, const fs::path& out, double sigma2, std::uint64_t seed) {
  save_off(perturb_along_normals(load_mesh(in), sigma2, seed), out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-consistent multi-shape matching with QUBO-based alpha-expansion"};
  app.require_subcommand(1);

  fs::path config_path;
  auto* match = app.add_subcommand("match", "Match a shape collection from a run configuration");
  match->add_option("--config", config_path, "Run configuration (JSON)")->required();

  std::vector<std::string> preds, truths, targets, group;
  fs::path eval_out = "eval";
  auto* eval = app.add_subcommand("eval", "Geodesic error, PCK and AUC of predicted permutations");
  eval->add_option("--pred", preds, "Predicted permutation file(s)");
  eval->add_option("--truth", truths, "Ground-truth permutation file(s)");
  eval->add_option("--target", targets, "Target mesh of each pair");
  eval->add_option("--group", group, "Average the AUC of several eval summary.json files");
  eval->add_option("--out", eval_out, "Output directory");

  std::string problem_path = "-";
  std::string backend = "sa";
  SolveRequest request;
  auto* solve = app.add_subcommand("solve-qubo", "Solve a QUBO JSON document and print the result");
  solve->add_option("--problem", problem_path, "QUBO JSON file, '-' for stdin");
  solve->add_option("--backend", backend, "exact, sa or external:<command>");
  solve->add_option("--reads", request.num_reads, "Number of reads")->check(CLI::PositiveNumber);
  solve->add_option("--sweeps", request.anneal.sweeps, "Annealing sweeps per read")->check(CLI::PositiveNumber);
  solve->add_option("--seed", request.seed, "Random seed");

  std::vector<std::string> init_meshes, init_labels;
  HksParams hks_params;
  fs::path init_out = "init";
  auto* init = app.add_subcommand("init", "Descriptor-based initial permutations for all shape pairs");
  init->add_option("--shapes", init_meshes, "Mesh files")->required();
  init->add_option("--labels", init_labels, "Side label files, one per mesh");
  init->add_option("--num-eigs", hks_params.num_eigs, "Laplacian eigenpairs");
  init->add_option("--num-times", hks_params.num_times, "HKS time samples");
  init->add_option("--out", init_out, "Output directory");

  fs::path perturb_in, perturb_out;
  double sigma2 = 0.0;
  std::uint64_t perturb_seed = 0;
  auto* perturb = app.add_subcommand("perturb", "Jitter vertices along their normals");
  perturb->add_option("--mesh", perturb_in, "Input mesh")->required();
  perturb->add_option("--out", perturb_out, "Output OFF file")->required();
  perturb->add_option("--sigma2", sigma2, "Noise variance")->required();
  perturb->add_option("--seed", perturb_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*match) return cmd_match(config_path);
    if (*eval) {
      if (!group.empty()) return cmd_eval_group(group, eval_out);
      return cmd_eval(preds, truths, targets, eval_out);
    }
    if (*solve) return cmd_solve(problem_path, backend, request);
    if (*init) return cmd_init(init_meshes, init_labels, hks_params, init_out);
    if (*perturb) return cmd_perturb(perturb_in, perturb_out, sigma2, perturb_seed);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const TopologyError& e) {
    std::cerr << "topology error: " << e.what() << '\n';
    return kTopology;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kParameter;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return kDimension;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const EnergyMismatchError& e) {
    std::cerr << "energy mismatch: " << e.what() << '\n';
    return kEnergyMismatch;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
