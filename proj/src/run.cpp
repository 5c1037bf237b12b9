#include "cyclematch/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cyclematch/error.hpp"

namespace cyclematch {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.imbue(std::locale::classic());
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    if (!doc.is_object()) throw ParseError("run configuration must be a JSON object");
    for (const auto& s : doc.at("shapes")) c.shapes.push_back(resolve(base_dir, s.get<std::string>()));
    if (doc.contains("side_labels")) {
      for (const auto& s : doc["side_labels"]) c.side_labels.push_back(resolve(base_dir, s.get<std::string>()));
      if (c.side_labels.size() != c.shapes.size()) throw ParseError("side_labels must list one file per shape");
    }
    c.t = doc.value("T", c.t);
    c.worst_fraction = doc.value("worst_fraction", c.worst_fraction);
    c.seed = doc.value("seed", c.seed);
    c.backend = doc.value("backend", c.backend);
    if (doc.contains("sa")) {
      const auto& sa = doc["sa"];
      c.solve.num_reads = sa.value("num_reads", c.solve.num_reads);
      c.solve.anneal.sweeps = sa.value("sweeps", c.solve.anneal.sweeps);
      if (sa.contains("beta_min") && !sa["beta_min"].is_null()) c.solve.anneal.beta_min = sa["beta_min"].get<double>();
      if (sa.contains("beta_max") && !sa["beta_max"].is_null()) c.solve.anneal.beta_max = sa["beta_max"].get<double>();
    }
    c.monotone_guard = doc.value("monotone_guard", c.monotone_guard);
    c.strict_rebuild = doc.value("strict_rebuild", c.strict_rebuild);
    c.kernelize = doc.value("kernelize", c.kernelize);
    c.init = doc.value("init", c.init);
    if (c.init != "hks" && c.init != "identity") throw ParseError("init must be \"hks\" or \"identity\"");
    if (doc.contains("hks")) {
      c.hks.num_eigs = doc["hks"].value("num_eigs", c.hks.num_eigs);
      c.hks.num_times = doc["hks"].value("num_times", c.hks.num_times);
    }
    c.output_dir = resolve(base_dir, doc.value("output_dir", std::string("out")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid run configuration: ") + e.what());
  }
  make_solver(c.backend);  // validates the backend string
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& s : c.shapes) shapes.push_back(s.string());
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& s : c.side_labels) labels.push_back(s.string());
  nlohmann::json sa = {{"num_reads", c.solve.num_reads}, {"sweeps", c.solve.anneal.sweeps}};
  sa["beta_min"] = c.solve.anneal.beta_min ? nlohmann::json(*c.solve.anneal.beta_min) : nlohmann::json(nullptr);
  sa["beta_max"] = c.solve.anneal.beta_max ? nlohmann::json(*c.solve.anneal.beta_max) : nlohmann::json(nullptr);
  return {{"shapes", shapes},
          {"side_labels", labels},
          {"T", c.t},
          {"worst_fraction", c.worst_fraction},
          {"seed", c.seed},
          {"backend", c.backend},
          {"sa", sa},
          {"monotone_guard", c.monotone_guard},
          {"strict_rebuild", c.strict_rebuild},
          {"kernelize", c.kernelize},
          {"init", c.init},
          {"hks", {{"num_eigs", c.hks.num_eigs}, {"num_times", c.hks.num_times}}},
          {"output_dir", c.output_dir.string()}};
}

std::vector<ShapeData> load_shapes(const std::vector<std::filesystem::path>& meshes,
                                   const std::vector<std::filesystem::path>& side_labels) {
  if (!side_labels.empty() && side_labels.size() != meshes.size()) {
    throw DimensionError("side label files must match mesh files one to one");
  }
  std::vector<ShapeData> shapes;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    Mesh mesh = load_mesh(meshes[i]);
    if (!side_labels.empty()) mesh.side_labels = load_side_labels(side_labels[i], mesh);
    shapes.push_back(prepare_shape(std::move(mesh)));
  }
  return shapes;
}

void write_energy_log(const std::vector<EnergyLogRow>& log, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << std::setprecision(17);
  out << "iteration,mode,energy,seconds\n";
  for (const auto& row : log) {
    out << row.iteration << ',' << to_string(row.mode) << ',' << row.energy << ',' << row.seconds << '\n';
  }
}

MatchResult run_match(const RunConfig& config) {
  const auto started = utc_timestamp();
  const auto clock_start = std::chrono::steady_clock::now();
  const auto shapes = load_shapes(config.shapes, config.side_labels);

  MatchConfig mc;
  mc.t = config.t;
  mc.worst_fraction = config.worst_fraction;
  mc.seed = config.seed;
  mc.solver = make_solver(config.backend);
  mc.step.request = config.solve;
  mc.step.strict_rebuild = config.strict_rebuild;
  mc.step.kernelize = config.kernelize;
  mc.monotone_guard = config.monotone_guard;
  mc.init = config.init == "identity" ? InitMode::Identity : InitMode::Hks;
  mc.hks = config.hks;
  MatchResult result = match_collection(shapes, mc);

  std::filesystem::create_directories(config.output_dir);
  const auto& state = result.state;
  for (int i = 0; i < state.num_shapes(); ++i) {
    if (i == state.anchor) continue;
    save_permutation(state.to_anchor[i], config.output_dir / ("shape" + std::to_string(i) + "_to_anchor.txt"));
  }
  write_energy_log(result.log, config.output_dir / "energy_log.csv");

  nlohmann::json summary = {
      {"anchor", state.anchor},
      {"num_shapes", state.num_shapes()},
      {"num_vertices", shapes.front().geodesic.size()},
      {"iterations", state.iteration},
      {"initial_energy", result.initial_energy},
      {"final_energy", result.log.empty() ? result.initial_energy : result.log.back().energy},
      {"energy", "sum over shapes I != anchor of the geodesic QAP energy of P_I->anchor"},
      {"config", run_config_to_json(config)},
      {"started_at", started},
      {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count()}};
  auto out = open_output(config.output_dir / "summary.json");
  out << summary.dump(2) << '\n';
  return result;
}

void write_eval_report(const EvalReport& report, int n, int num_pairs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "pck.csv");
    out << std::setprecision(17) << "threshold,fraction\n";
    for (const auto& p : report.pck_curve) out << p.threshold << ',' << p.fraction << '\n';
  }
  const auto& curve = report.pck_curve;
  nlohmann::json summary = {
      {"auc", report.auc},
      {"n", n},
      {"num_pairs", num_pairs},
      {"threshold_grid", {{"min", curve.front().threshold}, {"max", curve.back().threshold}, {"points", curve.size()}}},
      {"auc_normalization", "trapezoidal area divided by the threshold span"},
      {"pck_comparison", "error <= threshold"}};
  auto out = open_output(dir / "summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace cyclematch
