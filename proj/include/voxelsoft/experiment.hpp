#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxelsoft/codesign.hpp"
#include "voxelsoft/common.hpp"
#include "voxelsoft/design.hpp"
#include "voxelsoft/env.hpp"
#include "voxelsoft/physics.hpp"
#include "voxelsoft/policy.hpp"
#include "voxelsoft/svg.hpp"

namespace voxelsoft {

// ---------------------------------------------------------------------------
// file helpers

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for `" + path + "`");
  return ss.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write `" + path + "`");
  out << content;
  if (!out) throw IoError("write failed for `" + path + "`");
}

// ---------------------------------------------------------------------------
// experiment configuration (single JSON document, strict keys, all defaults
// echoed back into the run report)

struct ExperimentConfig {
  TaskId task = TaskId::kWalker;
  Paradigm paradigm = Paradigm::kReactive;
  std::vector<uint64_t> seeds{1};
  std::string out_dir = "runs/out";
  EvolutionConfig evolution;
  TrainConfig train;
  SimParams sim;
  // environment settings
  int episode_ticks = 500;
  double passage_height = 0.15;
  bool observe_prev_stiffness = true;
  std::optional<std::vector<double>> terrain_heights;
  double terrain_origin_x = 0.0;
  double terrain_cell_width = 0.1;
};

namespace detail {

inline void check_keys(const nlohmann::json& j,
                       const std::vector<std::string>& allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) ==
        allowed.end()) {
      throw ConfigError("unknown key `" + it.key() + "` in " + where);
    }
  }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    detail::check_keys(j,
                       {"task", "paradigm", "seeds", "out_dir", "evolution",
                        "train", "sim", "env"},
                       "config");
    cfg.task = task_from_name(j.at("task").get<std::string>());
    cfg.paradigm = paradigm_from_name(j.at("paradigm").get<std::string>());
    if (j.contains("seeds")) {
      cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
      if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
    }
    detail::maybe(j, "out_dir", cfg.out_dir);

    if (j.contains("evolution")) {
      const auto& e = j.at("evolution");
      detail::check_keys(
          e,
          {"population", "generations", "survivors", "morph_mutation_rate",
           "material_sigma", "local_search_iters", "inner_budget",
           "finetune_budget", "grid_width", "grid_height", "init_occupancy"},
          "evolution");
      detail::maybe(e, "population", cfg.evolution.population);
      detail::maybe(e, "generations", cfg.evolution.generations);
      detail::maybe(e, "survivors", cfg.evolution.survivors);
      detail::maybe(e, "morph_mutation_rate",
                    cfg.evolution.morph_mutation_rate);
      detail::maybe(e, "material_sigma", cfg.evolution.material_sigma);
      detail::maybe(e, "local_search_iters",
                    cfg.evolution.local_search_iters);
      detail::maybe(e, "inner_budget", cfg.evolution.inner_budget);
      detail::maybe(e, "finetune_budget", cfg.evolution.finetune_budget);
      detail::maybe(e, "grid_width", cfg.evolution.grid_width);
      detail::maybe(e, "grid_height", cfg.evolution.grid_height);
      detail::maybe(e, "init_occupancy", cfg.evolution.init_occupancy);
    }
    cfg.evolution.paradigm = cfg.paradigm;

    if (j.contains("train")) {
      const auto& t = j.at("train");
      detail::check_keys(t,
                         {"gamma", "gae_lambda", "clip_ratio",
                          "learning_rate", "epochs", "minibatch",
                          "rollout_ticks", "value_coef", "entropy_coef",
                          "hidden", "eval_episodes"},
                         "train");
      detail::maybe(t, "gamma", cfg.train.gamma);
      detail::maybe(t, "gae_lambda", cfg.train.gae_lambda);
      detail::maybe(t, "clip_ratio", cfg.train.clip_ratio);
      detail::maybe(t, "learning_rate", cfg.train.learning_rate);
      detail::maybe(t, "epochs", cfg.train.epochs);
      detail::maybe(t, "minibatch", cfg.train.minibatch);
      detail::maybe(t, "rollout_ticks", cfg.train.rollout_ticks);
      detail::maybe(t, "value_coef", cfg.train.value_coef);
      detail::maybe(t, "entropy_coef", cfg.train.entropy_coef);
      detail::maybe(t, "hidden", cfg.train.hidden);
      detail::maybe(t, "eval_episodes", cfg.train.eval_episodes);
    }

    if (j.contains("sim")) {
      const auto& s = j.at("sim");
      detail::check_keys(
          s,
          {"dt", "gravity", "spring_damping", "ground_height",
           "contact_stiffness", "contact_damping", "friction_coefficient",
           "mass_per_corner", "voxel_size", "k_base_soft",
           "rigid_stiffness_ratio", "scale_actuator_stiffness"},
          "sim");
      detail::maybe(s, "dt", cfg.sim.dt);
      detail::maybe(s, "gravity", cfg.sim.gravity);
      detail::maybe(s, "spring_damping", cfg.sim.spring_damping);
      detail::maybe(s, "ground_height", cfg.sim.ground_height);
      detail::maybe(s, "contact_stiffness", cfg.sim.contact_stiffness);
      detail::maybe(s, "contact_damping", cfg.sim.contact_damping);
      detail::maybe(s, "friction_coefficient",
                    cfg.sim.friction_coefficient);
      detail::maybe(s, "mass_per_corner", cfg.sim.mass_per_corner);
      detail::maybe(s, "voxel_size", cfg.sim.voxel_size);
      detail::maybe(s, "k_base_soft", cfg.sim.k_base_soft);
      detail::maybe(s, "rigid_stiffness_ratio",
                    cfg.sim.rigid_stiffness_ratio);
      detail::maybe(s, "scale_actuator_stiffness",
                    cfg.sim.scale_actuator_stiffness);
      if (cfg.sim.dt <= 0) throw ConfigError("sim.dt must be > 0");
      if (cfg.sim.contact_stiffness < 0)
        throw ConfigError("sim.contact_stiffness must be >= 0");
    }

    if (j.contains("env")) {
      const auto& e = j.at("env");
      detail::check_keys(e,
                         {"episode_ticks", "passage_height",
                          "observe_prev_stiffness", "terrain_heights",
                          "terrain_origin_x", "terrain_cell_width"},
                         "env");
      detail::maybe(e, "episode_ticks", cfg.episode_ticks);
      detail::maybe(e, "passage_height", cfg.passage_height);
      detail::maybe(e, "observe_prev_stiffness",
                    cfg.observe_prev_stiffness);
      if (e.contains("terrain_heights")) {
        cfg.terrain_heights =
            e.at("terrain_heights").get<std::vector<double>>();
      }
      detail::maybe(e, "terrain_origin_x", cfg.terrain_origin_x);
      detail::maybe(e, "terrain_cell_width", cfg.terrain_cell_width);
      if (cfg.episode_ticks < 1)
        throw ConfigError("env.episode_ticks must be >= 1");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config document: ") + e.what());
  }
  validate_config(cfg.evolution);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config document: ") + e.what());
  }
  return parse_experiment_config(j);
}

// Fully resolved echo; a report carrying this block is self-describing.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["task"] = task_name(cfg.task);
  j["paradigm"] = paradigm_name(cfg.paradigm);
  j["seeds"] = cfg.seeds;
  j["out_dir"] = cfg.out_dir;
  j["evolution"] = {
      {"population", cfg.evolution.population},
      {"generations", cfg.evolution.generations},
      {"survivors", cfg.evolution.survivors},
      {"morph_mutation_rate", cfg.evolution.morph_mutation_rate},
      {"material_sigma", cfg.evolution.material_sigma},
      {"local_search_iters", cfg.evolution.local_search_iters},
      {"inner_budget", cfg.evolution.inner_budget},
      {"finetune_budget", cfg.evolution.finetune_budget},
      {"grid_width", cfg.evolution.grid_width},
      {"grid_height", cfg.evolution.grid_height},
      {"init_occupancy", cfg.evolution.init_occupancy}};
  j["train"] = {{"gamma", cfg.train.gamma},
                {"gae_lambda", cfg.train.gae_lambda},
                {"clip_ratio", cfg.train.clip_ratio},
                {"learning_rate", cfg.train.learning_rate},
                {"epochs", cfg.train.epochs},
                {"minibatch", cfg.train.minibatch},
                {"rollout_ticks", cfg.train.rollout_ticks},
                {"value_coef", cfg.train.value_coef},
                {"entropy_coef", cfg.train.entropy_coef},
                {"hidden", cfg.train.hidden},
                {"eval_episodes", cfg.train.eval_episodes}};
  j["sim"] = {{"dt", cfg.sim.dt},
              {"gravity", cfg.sim.gravity},
              {"spring_damping", cfg.sim.spring_damping},
              {"ground_height", cfg.sim.ground_height},
              {"contact_stiffness", cfg.sim.contact_stiffness},
              {"contact_damping", cfg.sim.contact_damping},
              {"friction_coefficient", cfg.sim.friction_coefficient},
              {"mass_per_corner", cfg.sim.mass_per_corner},
              {"voxel_size", cfg.sim.voxel_size},
              {"k_base_soft", cfg.sim.k_base_soft},
              {"rigid_stiffness_ratio", cfg.sim.rigid_stiffness_ratio},
              {"scale_actuator_stiffness", cfg.sim.scale_actuator_stiffness}};
  j["env"] = {{"episode_ticks", cfg.episode_ticks},
              {"passage_height", cfg.passage_height},
              {"observe_prev_stiffness", cfg.observe_prev_stiffness},
              {"terrain_origin_x", cfg.terrain_origin_x},
              {"terrain_cell_width", cfg.terrain_cell_width}};
  if (cfg.terrain_heights) j["env"]["terrain_heights"] = *cfg.terrain_heights;
  return j;
}

inline TaskSpec task_spec_from_config(const ExperimentConfig& cfg) {
  TaskSpec task = make_task(cfg.task, cfg.episode_ticks, cfg.sim.voxel_size,
                            cfg.passage_height);
  task.observe_prev_stiffness = cfg.observe_prev_stiffness;
  if (cfg.terrain_heights) {
    task.terrain.heights = *cfg.terrain_heights;
    task.terrain.origin_x = cfg.terrain_origin_x;
    task.terrain.cell_width = cfg.terrain_cell_width;
    task.terrain.contact_scale.clear();
  }
  return task;
}

// ---------------------------------------------------------------------------
// run artifacts

namespace detail {

inline std::string design_ref(int generation, int id) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "designs/g%03d_i%06d.json", generation, id);
  return buf;
}

inline std::string generation_log_name(int generation) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "gen_%03d.json", generation);
  return buf;
}

}  // namespace detail

inline nlohmann::json generation_log_to_json(const GenerationLog& log) {
  nlohmann::json j;
  j["generation"] = log.generation;
  j["seed"] = log.seed;
  j["best_id"] = log.best_id;
  nlohmann::json inds = nlohmann::json::array();
  for (const GenerationEntry& e : log.entries) {
    nlohmann::json je;
    je["id"] = e.id;
    je["parent_id"] = e.parent_id;
    je["fitness"] = e.fitness;
    je["design_ref"] = detail::design_ref(log.generation, e.id);
    inds.push_back(std::move(je));
  }
  j["individuals"] = std::move(inds);
  return j;
}

// Writes one JSON log per generation plus a design snapshot per individual.
inline void write_generation_logs(const std::string& dir,
                                  const std::vector<GenerationLog>& logs) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "designs");
  for (const GenerationLog& log : logs) {
    write_text_file(
        (fs::path(dir) / detail::generation_log_name(log.generation))
            .string(),
        generation_log_to_json(log).dump(2) + "\n");
    for (const GenerationEntry& e : log.entries) {
      write_text_file(
          (fs::path(dir) / detail::design_ref(log.generation, e.id)).string(),
          serialize_design(e.design));
    }
  }
}

struct SeedRun {
  uint64_t seed = 0;
  std::vector<double> best_curve;  // best fitness per generation
  std::vector<double> mean_curve;  // population mean per generation
  double best_fitness = 0.0;
  std::string dir;
  double wall_seconds = 0.0;
};

struct RunReport {
  nlohmann::json config_echo;
  std::vector<SeedRun> seed_runs;
  int best_seed_index = -1;
  double best_fitness = 0.0;
  std::string best_design_ref;      // path of the winning design file
  std::string best_controller_ref;  // path of its checkpoint
  double total_wall_seconds = 0.0;
};

inline nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["config"] = r.config_echo;
  nlohmann::json runs = nlohmann::json::array();
  for (const SeedRun& s : r.seed_runs) {
    runs.push_back({{"seed", s.seed},
                    {"dir", s.dir},
                    {"best_curve", s.best_curve},
                    {"mean_curve", s.mean_curve},
                    {"best_fitness", s.best_fitness},
                    {"wall_seconds", s.wall_seconds}});
  }
  j["seed_runs"] = std::move(runs);
  j["best_seed_index"] = r.best_seed_index;
  j["best_fitness"] = r.best_fitness;
  j["best_design_ref"] = r.best_design_ref;
  j["best_controller_ref"] = r.best_controller_ref;
  j["total_wall_seconds"] = r.total_wall_seconds;
  return j;
}

// CSV curve schema fixed by the CLI contract.
inline std::string curves_to_csv(const RunReport& r) {
  std::string out = "generation,seed,best_fitness,mean_fitness\n";
  for (const SeedRun& s : r.seed_runs) {
    for (size_t g = 0; g < s.best_curve.size(); ++g) {
      out += std::to_string(g) + "," + std::to_string(s.seed) + "," +
             format_double(s.best_curve[g]) + "," +
             format_double(s.mean_curve[g]) + "\n";
    }
  }
  return out;
}

inline std::string curves_svg(const RunReport& r, const std::string& title) {
  std::vector<SvgSeries> series;
  for (const SeedRun& s : r.seed_runs) {
    SvgSeries sr;
    sr.label = "seed " + std::to_string(s.seed);
    for (size_t g = 0; g < s.best_curve.size(); ++g) {
      sr.xs.push_back(double(g));
      sr.ys.push_back(s.best_curve[g]);
    }
    series.push_back(std::move(sr));
  }
  return render_line_chart(title, "generation", "best fitness", series);
}

// Executes the configured paradigm for every seed and writes all artifacts:
// per-seed generation logs and design snapshots, the best design and
// controller checkpoint, the curves CSV and an SVG plot, plus a JSON report.
inline RunReport run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  TaskSpec task = task_spec_from_config(cfg);
  RunReport report;
  report.config_echo = config_to_json(cfg);

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create `" + cfg.out_dir + "`");

  auto t_total = std::chrono::steady_clock::now();
  for (size_t si = 0; si < cfg.seeds.size(); ++si) {
    SeedRun run;
    run.seed = cfg.seeds[si];
    run.dir = (fs::path(cfg.out_dir) /
               ("seed_" + std::to_string(run.seed)))
                  .string();
    fs::create_directories(run.dir, ec);
    if (ec) throw IoError("cannot create `" + run.dir + "`");

    EvolutionConfig evo = cfg.evolution;
    evo.seed = run.seed;
    auto t0 = std::chrono::steady_clock::now();
    CodesignResult result = run_codesign(evo, task, cfg.train, cfg.sim);
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    for (const GenerationLog& log : result.logs) {
      double best = -std::numeric_limits<double>::infinity();
      double mean = 0.0;
      for (const GenerationEntry& e : log.entries) {
        best = std::max(best, e.fitness);
        mean += e.fitness;
      }
      run.best_curve.push_back(best);
      run.mean_curve.push_back(mean / double(log.entries.size()));
    }
    run.best_fitness = result.best.fitness.value_or(0.0);

    write_generation_logs(run.dir, result.logs);
    write_text_file((fs::path(run.dir) / "best_design.json").string(),
                    serialize_design(result.best.design));
    if (result.best.controller) {
      ControlMode mode = cfg.paradigm == Paradigm::kReactive
                             ? ControlMode::kReactive
                             : ControlMode::kInvariant;
      write_text_file(
          (fs::path(run.dir) / "best_controller.json").string(),
          policy_to_json(*result.best.controller, mode).dump(2) + "\n");
    }
    report.seed_runs.push_back(std::move(run));
  }
  report.total_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    t_total)
          .count();

  for (size_t si = 0; si < report.seed_runs.size(); ++si) {
    if (report.best_seed_index < 0 ||
        report.seed_runs[si].best_fitness > report.best_fitness) {
      report.best_seed_index = int(si);
      report.best_fitness = report.seed_runs[si].best_fitness;
    }
  }
  if (report.best_seed_index >= 0) {
    const SeedRun& win = report.seed_runs[size_t(report.best_seed_index)];
    report.best_design_ref =
        (fs::path(win.dir) / "best_design.json").string();
    report.best_controller_ref =
        (fs::path(win.dir) / "best_controller.json").string();
  }

  write_text_file((fs::path(cfg.out_dir) / "curves.csv").string(),
                  curves_to_csv(report));
  write_text_file(
      (fs::path(cfg.out_dir) / "fitness.svg").string(),
      curves_svg(report, std::string(task_name(cfg.task)) + " / " +
                             paradigm_name(cfg.paradigm)));
  write_text_file((fs::path(cfg.out_dir) / "run_report.json").string(),
                  report_to_json(report).dump(2) + "\n");
  return report;
}

// ---------------------------------------------------------------------------
// compare: mean and min/max band across seeds, one series per report

inline void write_compare(const std::vector<std::string>& report_paths,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  struct Loaded {
    std::string label;
    std::vector<std::vector<double>> curves;  // per seed
  };
  std::vector<Loaded> reports;
  size_t generations = 0;
  for (const std::string& path : report_paths) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("report `" + path + "`: " + e.what());
    }
    Loaded l;
    l.label = fs::path(path).parent_path().filename().string();
    if (l.label.empty()) l.label = path;
    try {
      for (const auto& run : j.at("seed_runs")) {
        l.curves.push_back(run.at("best_curve").get<std::vector<double>>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("report `" + path + "`: " + e.what());
    }
    if (l.curves.empty())
      throw ParseError("report `" + path + "` has no seed runs");
    for (const auto& c : l.curves) {
      if (generations == 0) generations = c.size();
      if (c.size() != generations) {
        throw MismatchedHorizons(
            "reports disagree on the number of generations");
      }
    }
    reports.push_back(std::move(l));
  }

  std::string csv = "report,generation,mean_best,min_best,max_best\n";
  std::vector<SvgSeries> series;
  for (const Loaded& l : reports) {
    SvgSeries sr;
    sr.label = l.label;
    for (size_t g = 0; g < generations; ++g) {
      double mean = 0.0;
      double lo = l.curves[0][g], hi = l.curves[0][g];
      for (const auto& c : l.curves) {
        mean += c[g];
        lo = std::min(lo, c[g]);
        hi = std::max(hi, c[g]);
      }
      mean /= double(l.curves.size());
      csv += l.label + "," + std::to_string(g) + "," + format_double(mean) +
             "," + format_double(lo) + "," + format_double(hi) + "\n";
      sr.xs.push_back(double(g));
      sr.ys.push_back(mean);
      sr.band_lo.push_back(lo);
      sr.band_hi.push_back(hi);
    }
    series.push_back(std::move(sr));
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create `" + out_dir + "`");
  write_text_file((fs::path(out_dir) / "compare.csv").string(), csv);
  write_text_file(
      (fs::path(out_dir) / "compare.svg").string(),
      render_line_chart("mean best fitness across seeds", "generation",
                        "fitness", series));
}

// ---------------------------------------------------------------------------
// replay: deterministic rollout dump of a stored design + controller

inline void replay(const std::string& design_path,
                   const std::string& checkpoint_path, TaskId task_id,
                   int steps, const std::string& out_dir,
                   const SimParams& sim = {}, int episode_ticks = 500,
                   double passage_height = 0.15) {
  namespace fs = std::filesystem;
  RobotDesign design = deserialize_design(read_text_file(design_path));
  nlohmann::json cj;
  try {
    cj = nlohmann::json::parse(read_text_file(checkpoint_path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint `" + checkpoint_path + "`: " + e.what());
  }
  PolicyCheckpoint ck = policy_from_json(cj);
  ck.policy.norm.frozen = true;

  TaskSpec task = make_task(task_id, std::max(episode_ticks, steps),
                            sim.voxel_size, passage_height);
  Env env(task, design, ck.mode, kEvalSeed, sim);
  if (ck.policy.obs_dim() != env.observation_dim() ||
      ck.policy.act_dim() != env.action_dim()) {
    throw IncompatibleController(
        "checkpoint dimensions do not match (design, task, mode): expected "
        "obs " +
        std::to_string(env.observation_dim()) + " act " +
        std::to_string(env.action_dim()) + ", checkpoint has obs " +
        std::to_string(ck.policy.obs_dim()) + " act " +
        std::to_string(ck.policy.act_dim()));
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create `" + out_dir + "`");
  std::ofstream traj((fs::path(out_dir) / "trajectory.csv").string(),
                     std::ios::binary | std::ios::trunc);
  std::ofstream stiff((fs::path(out_dir) / "stiffness.csv").string(),
                      std::ios::binary | std::ios::trunc);
  if (!traj || !stiff) throw IoError("cannot write replay CSVs");

  write_trajectory_header(traj);
  write_stiffness_header(stiff);
  env.reset();
  write_trajectory_record(traj, env.state());
  write_stiffness_record(stiff, env.system(), env.state().t);
  for (int t = 0; t < steps && !env.done(); ++t) {
    PolicyOutput out = ck.policy.act(env.observation(), false, nullptr);
    MappedAction mapped = map_action(out.action, ck.mode, env.n_actuators(),
                                     env.n_occupied());
    std::vector<double> cmd = mapped.actuation;
    cmd.insert(cmd.end(), mapped.stiffness.begin(), mapped.stiffness.end());
    env.step(cmd);
    write_trajectory_record(traj, env.state());
    write_stiffness_record(stiff, env.system(), env.state().t);
  }
  if (!traj || !stiff) throw IoError("write failed for replay CSVs");
}

}  // namespace voxelsoft
