// fcso: batch synthesis of conforming gripper fingerpads from STL models.
//
// Exit codes: 0 ok, 2 config validation, 3 geometry failure, 4 no feasible
// grasp.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fcso/pipeline.hpp"
#include "fcso/stl_io.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitNoGrasp = 4;

int cmd_run(const std::string& config_path, bool skip_quality) {
  fcso::RunConfig config = fcso::load_config_file(config_path);
  config.skip_quality = config.skip_quality || skip_quality;
  const fcso::RunReport report = fcso::run_pipeline(config);
  if (!config.skip_quality)
    std::cout << "finger: " << report.finger_stl.string() << "\n"
              << "report: " << report.report_csv.string() << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const fcso::RunConfig config = fcso::load_config_file(config_path);
  const auto violations = fcso::validate(config);
  if (violations.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << v << "\n";
  return kExitValidation;
}

int cmd_poses(const std::string& stl_path, double scale) {
  const fcso::TriMesh mesh = fcso::load_stl_file(stl_path, scale);
  const auto poses = fcso::enumerate_stable_poses(mesh);
  std::printf("%zu stable poses\n", poses.size());
  std::printf("%-6s %-12s %-10s\n", "index", "probability", "facets");
  for (std::size_t i = 0; i < poses.size(); ++i)
    std::printf("%-6zu %-12.6f %-10zu\n", i, poses[i].probability,
                poses[i].support_facet.size());
  return 0;
}

int cmd_score(const std::string& csv_path, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open records CSV: " + csv_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const fcso::ScoreResult result = fcso::score_records_csv(ss.str());
  if (out_path.empty()) {
    std::cout << result.report_csv;
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    out << result.report_csv;
  }
  std::cerr << "best combination: " << result.selection.best_combination
            << " (Q_max=" << result.selection.best_quality << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FCSO: fingerpad customization with set operators"};
  app.require_subcommand(1);

  std::string config_path, stl_path, csv_path, out_path;
  double scale = 1.0;
  bool skip_quality = false;

  auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_flag("--skip-quality", skip_quality,
                "debug: emit every combination's pad and stop before scoring");

  auto* validate = app.add_subcommand("validate", "check a config file and report violations");
  validate->add_option("config", config_path, "config file")->required();

  auto* poses = app.add_subcommand("poses", "list stable poses of an STL model");
  poses->add_option("stl", stl_path, "STL file")->required();
  poses->add_option("--scale", scale, "unit scale applied on load");

  auto* score = app.add_subcommand("score", "selection math on a records CSV (i,pose,rles,area)");
  score->add_option("records", csv_path, "records CSV")->required();
  score->add_option("-o,--output", out_path, "write the report CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, skip_quality);
    if (validate->parsed()) return cmd_validate(config_path);
    if (poses->parsed()) return cmd_poses(stl_path, scale);
    if (score->parsed()) return cmd_score(csv_path, out_path);
  } catch (const fcso::ConfigValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const fcso::NoFeasibleGraspError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoGrasp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeometry;
  }
  return 0;
}
