// voxelsoft experiment CLI: run co-design experiments, compare reports,
// replay stored controllers, validate design files.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxelsoft/experiment.hpp"

namespace {

using namespace voxelsoft;

int cmd_run(const std::string& config_path) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  RunReport report = run_experiment(cfg);
  std::cout << "run complete: " << cfg.out_dir << "\n";
  for (const SeedRun& s : report.seed_runs) {
    std::cout << "  seed " << s.seed << ": best fitness "
              << format_double(s.best_fitness) << " ("
              << format_double(s.wall_seconds) << " s)\n";
  }
  std::cout << "  best overall: " << format_double(report.best_fitness)
            << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& reports,
                const std::string& out_dir) {
  write_compare(reports, out_dir);
  std::cout << "wrote " << out_dir << "/compare.csv and compare.svg\n";
  return 0;
}

int cmd_replay(const std::string& design_path, const std::string& ckpt_path,
               const std::string& task, int steps,
               const std::string& out_dir) {
  replay(design_path, ckpt_path, task_from_name(task), steps, out_dir);
  std::cout << "wrote " << out_dir << "/trajectory.csv and stiffness.csv\n";
  return 0;
}

int cmd_validate(const std::string& design_path) {
  std::string text = read_text_file(design_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("design document: ") + e.what());
  }
  // parse without the validity gate so violations can be reported
  RobotDesign d;
  try {
    d.morphology.width = j.at("width").get<int>();
    d.morphology.height = j.at("height").get<int>();
    auto cells = j.at("cells").get<std::vector<int>>();
    d.morphology.cells.assign(cells.begin(), cells.end());
    d.stiffness.width = d.morphology.width;
    d.stiffness.height = d.morphology.height;
    d.stiffness.values = j.at("stiffness").get<std::vector<double>>();
    d.id = j.value("id", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("design document: ") + e.what());
  }
  ValidationResult res = validate_design(d);
  if (res.ok()) {
    std::cout << "ok\n";
    return 0;
  }
  std::cout << res.summary() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxelsoft: 2D voxel soft-robot co-design experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "experiment config (JSON)")
      ->required();

  std::vector<std::string> report_paths;
  std::string compare_out = "compare";
  auto* compare =
      app.add_subcommand("compare", "overlay fitness curves across runs");
  compare->add_option("reports", report_paths, "run_report.json paths")
      ->required()
      ->expected(-1);
  compare->add_option("--out", compare_out, "output directory");

  std::string design_path, ckpt_path, task = "walker",
                           replay_out = "replay";
  int steps = 500;
  auto* rep = app.add_subcommand(
      "replay", "deterministic trajectory dump of a stored controller");
  rep->add_option("design", design_path, "design file (JSON)")->required();
  rep->add_option("checkpoint", ckpt_path, "controller checkpoint (JSON)")
      ->required();
  rep->add_option("--task", task, "task id");
  rep->add_option("--steps", steps, "control ticks to replay");
  rep->add_option("--out", replay_out, "output directory");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a design file");
  val->add_option("design", validate_path, "design file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*compare) return cmd_compare(report_paths, compare_out);
    if (*rep) return cmd_replay(design_path, ckpt_path, task, steps,
                                replay_out);
    if (*val) return cmd_validate(validate_path);
  } catch (const voxelsoft::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const voxelsoft::SimulationDiverged& e) {
    std::cerr << "simulation diverged: " << e.what() << "\n";
    return 4;
  } catch (const voxelsoft::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const voxelsoft::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const voxelsoft::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const voxelsoft::IncompatibleController& e) {
    std::cerr << "incompatible controller: " << e.what() << "\n";
    return 2;
  } catch (const voxelsoft::MismatchedHorizons& e) {
    std::cerr << "mismatched horizons: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
