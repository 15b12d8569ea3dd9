#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "voxelsoft/experiment.hpp"

using namespace voxelsoft;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "voxelsoft_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json smoke_config(const std::string& out_dir) {
  return nlohmann::json{
      {"task", "walker"},
      {"paradigm", "reactive"},
      {"seeds", {1, 2}},
      {"out_dir", out_dir},
      {"evolution",
       {{"population", 3},
        {"generations", 2},
        {"survivors", 1},
        {"inner_budget", 1}}},
      {"train",
       {{"rollout_ticks", 30},
        {"minibatch", 15},
        {"epochs", 2},
        {"hidden", {8}}}},
      {"env", {{"episode_ticks", 15}}}};
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(VOXELSOFT_CLI_PATH) + " " + args +
                    " >/dev/null 2>&1";
  int ret = std::system(cmd.c_str());
  return WEXITSTATUS(ret);
}

}  // namespace

TEST_CASE("config parsing applies defaults and validates") {
  ExperimentConfig cfg = parse_experiment_config(smoke_config("x"));
  REQUIRE(cfg.task == TaskId::kWalker);
  REQUIRE(cfg.paradigm == Paradigm::kReactive);
  REQUIRE(cfg.seeds == std::vector<uint64_t>{1, 2});
  REQUIRE(cfg.evolution.population == 3);
  REQUIRE(cfg.train.gamma == 0.99);  // untouched default
  REQUIRE(cfg.episode_ticks == 15);
}

TEST_CASE("config parsing rejects unknown tasks, paradigms and keys") {
  nlohmann::json j = smoke_config("x");
  j["task"] = "flyer";
  REQUIRE_THROWS_AS(parse_experiment_config(j), ConfigError);
  j = smoke_config("x");
  j["paradigm"] = "psychic";
  REQUIRE_THROWS_AS(parse_experiment_config(j), ConfigError);
  j = smoke_config("x");
  j["typo_key"] = 1;
  REQUIRE_THROWS_AS(parse_experiment_config(j), ConfigError);
  j = smoke_config("x");
  j["evolution"]["popsize"] = 4;
  REQUIRE_THROWS_AS(parse_experiment_config(j), ConfigError);
  j = smoke_config("x");
  j["seeds"] = nlohmann::json::array();
  REQUIRE_THROWS_AS(parse_experiment_config(j), ConfigError);
}

TEST_CASE("config echo round-trips through the parser") {
  ExperimentConfig cfg = parse_experiment_config(smoke_config("x"));
  nlohmann::json echo = config_to_json(cfg);
  ExperimentConfig back = parse_experiment_config(echo);
  REQUIRE(config_to_json(back) == echo);
}

TEST_CASE("run_experiment writes the full artifact set") {
  fs::path out = temp_dir("run_artifacts");
  nlohmann::json j = smoke_config(out.string());
  ExperimentConfig cfg = parse_experiment_config(j);
  RunReport report = run_experiment(cfg);

  REQUIRE(report.seed_runs.size() == 2);
  REQUIRE(report.seed_runs[0].best_curve.size() == 2);
  REQUIRE(fs::exists(out / "curves.csv"));
  REQUIRE(fs::exists(out / "fitness.svg"));
  REQUIRE(fs::exists(out / "run_report.json"));
  for (uint64_t seed : {1, 2}) {
    fs::path sd = out / ("seed_" + std::to_string(seed));
    REQUIRE(fs::exists(sd / "gen_000.json"));
    REQUIRE(fs::exists(sd / "gen_001.json"));
    REQUIRE(fs::exists(sd / "best_design.json"));
    REQUIRE(fs::exists(sd / "best_controller.json"));
  }

  // every artifact the run wrote is re-readable
  ExperimentConfig echo = parse_experiment_config(
      nlohmann::json::parse(read_text_file((out / "run_report.json").string()))
          .at("config"));
  REQUIRE(echo.evolution.population == 3);
  RobotDesign best = deserialize_design(
      read_text_file((out / "seed_1" / "best_design.json").string()));
  REQUIRE(validate_design(best).ok());
  PolicyCheckpoint ck = policy_from_json(nlohmann::json::parse(
      read_text_file((out / "seed_1" / "best_controller.json").string())));
  REQUIRE(ck.mode == ControlMode::kReactive);

  // generation log references resolve
  nlohmann::json log = nlohmann::json::parse(
      read_text_file((out / "seed_1" / "gen_000.json").string()));
  REQUIRE(log.at("individuals").size() == 3);
  std::string ref = log.at("individuals")[0].at("design_ref");
  RobotDesign d =
      deserialize_design(read_text_file((out / "seed_1" / ref).string()));
  REQUIRE(validate_design(d).ok());

  // curve CSV schema
  std::string csv = read_text_file((out / "curves.csv").string());
  REQUIRE(csv.rfind("generation,seed,best_fitness,mean_fitness\n", 0) == 0);
}

TEST_CASE("repeated runs produce byte-identical CSV and log artifacts") {
  fs::path out1 = temp_dir("repeat_a");
  fs::path out2 = temp_dir("repeat_b");
  nlohmann::json j = smoke_config(out1.string());
  j["seeds"] = {7};
  j["evolution"]["population"] = 2;
  run_experiment(parse_experiment_config(j));
  j["out_dir"] = out2.string();
  run_experiment(parse_experiment_config(j));

  auto bytes = [](const fs::path& p) { return read_text_file(p.string()); };
  REQUIRE(bytes(out1 / "curves.csv") == bytes(out2 / "curves.csv"));
  REQUIRE(bytes(out1 / "fitness.svg") == bytes(out2 / "fitness.svg"));
  REQUIRE(bytes(out1 / "seed_7" / "gen_000.json") ==
          bytes(out2 / "seed_7" / "gen_000.json"));
  REQUIRE(bytes(out1 / "seed_7" / "best_design.json") ==
          bytes(out2 / "seed_7" / "best_design.json"));
  REQUIRE(bytes(out1 / "seed_7" / "best_controller.json") ==
          bytes(out2 / "seed_7" / "best_controller.json"));
}

TEST_CASE("compare: one report overlays onto its own curve") {
  fs::path out = temp_dir("compare_one");
  nlohmann::json j = smoke_config((out / "run").string());
  j["seeds"] = {3};
  j["evolution"]["population"] = 2;
  RunReport report = run_experiment(parse_experiment_config(j));
  write_compare({(out / "run" / "run_report.json").string()},
                (out / "cmp").string());
  std::string csv = read_text_file((out / "cmp" / "compare.csv").string());
  REQUIRE(csv.rfind("report,generation,mean_best,min_best,max_best\n", 0) ==
          0);
  // single seed: mean == min == max == the curve
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  int g = 0;
  while (std::getline(ss, line)) {
    std::vector<std::string> parts;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) parts.push_back(cell);
    REQUIRE(parts.size() == 5);
    REQUIRE(parts[2] == parts[3]);
    REQUIRE(parts[3] == parts[4]);
    double mean = std::stod(parts[2]);
    REQUIRE(mean ==
            Catch::Approx(report.seed_runs[0].best_curve[size_t(g)]));
    ++g;
  }
  REQUIRE(g == 2);
}

TEST_CASE("compare: identical reports give a zero-width band; mismatched "
          "horizons fail") {
  fs::path out = temp_dir("compare_two");
  nlohmann::json j = smoke_config((out / "a").string());
  j["seeds"] = {5, 6, 8};
  j["evolution"]["population"] = 2;
  run_experiment(parse_experiment_config(j));

  // three seeds: band is [min, max] across seeds
  write_compare({(out / "a" / "run_report.json").string()},
                (out / "cmp").string());
  std::string csv = read_text_file((out / "cmp" / "compare.csv").string());
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    std::vector<std::string> parts;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) parts.push_back(cell);
    double mean = std::stod(parts[2]);
    double lo = std::stod(parts[3]);
    double hi = std::stod(parts[4]);
    REQUIRE(lo <= mean);
    REQUIRE(mean <= hi);
  }

  nlohmann::json j2 = smoke_config((out / "b").string());
  j2["seeds"] = {5};
  j2["evolution"]["population"] = 2;
  j2["evolution"]["generations"] = 3;
  run_experiment(parse_experiment_config(j2));
  REQUIRE_THROWS_AS(
      write_compare({(out / "a" / "run_report.json").string(),
                     (out / "b" / "run_report.json").string()},
                    (out / "cmp2").string()),
      MismatchedHorizons);
}

TEST_CASE("compare: three known curves average correctly") {
  fs::path out = temp_dir("compare_math");
  // hand-built report with seeds scoring 1, 2, 3 at the only generation
  nlohmann::json report;
  report["config"] = nlohmann::json::object();
  report["seed_runs"] = nlohmann::json::array();
  for (int s = 0; s < 3; ++s) {
    report["seed_runs"].push_back(
        {{"seed", s}, {"best_curve", {double(s + 1)}}});
  }
  fs::create_directories(out / "r");
  write_text_file((out / "r" / "run_report.json").string(),
                  report.dump(2) + "\n");
  write_compare({(out / "r" / "run_report.json").string()},
                (out / "cmp").string());
  std::string csv = read_text_file((out / "cmp" / "compare.csv").string());
  REQUIRE(csv.find("r,0,2,1,3\n") != std::string::npos);
}

TEST_CASE("replay emits trajectory and stiffness CSVs deterministically") {
  fs::path out = temp_dir("replay");
  nlohmann::json j = smoke_config((out / "run").string());
  j["seeds"] = {4};
  j["evolution"]["population"] = 2;
  run_experiment(parse_experiment_config(j));

  std::string design = (out / "run" / "seed_4" / "best_design.json").string();
  std::string ckpt =
      (out / "run" / "seed_4" / "best_controller.json").string();
  replay(design, ckpt, TaskId::kWalker, 10, (out / "rp1").string());
  replay(design, ckpt, TaskId::kWalker, 10, (out / "rp2").string());
  std::string t1 = read_text_file((out / "rp1" / "trajectory.csv").string());
  std::string t2 = read_text_file((out / "rp2" / "trajectory.csv").string());
  REQUIRE(t1 == t2);
  REQUIRE(t1.rfind("t,mass_index,x,y,vx,vy\n", 0) == 0);
  std::string s1 = read_text_file((out / "rp1" / "stiffness.csv").string());
  REQUIRE(s1.rfind("t,voxel_i,voxel_j,factor\n", 0) == 0);

  // reactive checkpoints keep factors inside the legal band
  std::istringstream ss(s1);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    double f = std::stod(line.substr(line.rfind(',') + 1));
    REQUIRE(f >= 0.5);
    REQUIRE(f <= 2.0);
  }
}

TEST_CASE("replay rejects controllers with mismatched dimensions") {
  fs::path out = temp_dir("replay_bad");
  nlohmann::json j = smoke_config((out / "run").string());
  j["seeds"] = {4};
  j["evolution"]["population"] = 2;
  run_experiment(parse_experiment_config(j));
  std::string ckpt =
      (out / "run" / "seed_4" / "best_controller.json").string();

  RobotDesign other;
  other.morphology.width = 1;
  other.morphology.height = 1;
  other.morphology.cells = {kActuatorH};
  other.stiffness = StiffnessField(1, 1, 1.0);
  other.id = "tiny";
  write_text_file((out / "tiny.json").string(), serialize_design(other));
  REQUIRE_THROWS_AS(replay((out / "tiny.json").string(), ckpt,
                           TaskId::kWalker, 5, (out / "rp").string()),
                    IncompatibleController);
}

TEST_CASE("cli: validate accepts good designs and reports violations") {
  fs::path out = temp_dir("cli_validate");
  RobotDesign good;
  good.morphology.width = 1;
  good.morphology.height = 1;
  good.morphology.cells = {kActuatorV};
  good.stiffness = StiffnessField(1, 1, 1.0);
  good.id = "g";
  write_text_file((out / "good.json").string(), serialize_design(good));
  REQUIRE(run_cli("validate " + (out / "good.json").string()) == 0);

  nlohmann::json bad = design_to_json(good);
  bad["cells"] = {0};
  write_text_file((out / "bad.json").string(), bad.dump());
  REQUIRE(run_cli("validate " + (out / "bad.json").string()) == 1);
}

TEST_CASE("cli: exit codes map error classes") {
  fs::path out = temp_dir("cli_codes");
  // unknown task id -> config error -> 2
  nlohmann::json j = smoke_config((out / "r").string());
  j["task"] = "flyer";
  write_text_file((out / "bad_task.json").string(), j.dump());
  REQUIRE(run_cli("run " + (out / "bad_task.json").string()) == 2);
  // unreadable config -> io error -> 3
  REQUIRE(run_cli("run " + (out / "missing.json").string()) == 3);
  // malformed json -> 2
  write_text_file((out / "broken.json").string(), "{nope");
  REQUIRE(run_cli("run " + (out / "broken.json").string()) == 2);
  // bad subcommand usage -> 2
  REQUIRE(run_cli("frobnicate") == 2);
  // unstable physics diverges while settling the spawn -> 4
  nlohmann::json d = smoke_config((out / "d").string());
  d["sim"] = {{"dt", 0.05}};
  d["seeds"] = {1};
  write_text_file((out / "diverge.json").string(), d.dump());
  REQUIRE(run_cli("run " + (out / "diverge.json").string()) == 4);
}

TEST_CASE("cli: a smoke run completes end to end") {
  fs::path out = temp_dir("cli_run");
  nlohmann::json j = smoke_config((out / "r").string());
  j["seeds"] = {2};
  j["evolution"]["population"] = 2;
  j["evolution"]["generations"] = 1;
  write_text_file((out / "cfg.json").string(), j.dump(2));
  REQUIRE(run_cli("run " + (out / "cfg.json").string()) == 0);
  REQUIRE(fs::exists(out / "r" / "curves.csv"));
  REQUIRE(run_cli("compare " + (out / "r" / "run_report.json").string() +
                  " --out " + (out / "cmp").string()) == 0);
  REQUIRE(fs::exists(out / "cmp" / "compare.svg"));
  REQUIRE(run_cli("replay " + (out / "r" / "seed_2" / "best_design.json").string() +
                  " " + (out / "r" / "seed_2" / "best_controller.json").string() +
                  " --task walker --steps 5 --out " +
                  (out / "rp").string()) == 0);
  REQUIRE(fs::exists(out / "rp" / "stiffness.csv"));
}
