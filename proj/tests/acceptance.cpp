// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion carries its runtime budget as part of the check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "voxelsoft/experiment.hpp"

using namespace voxelsoft;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string label;
  bool passed = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      notes.push_back(what);
    }
  }
};

int g_failures = 0;

template <typename Fn>
void run_criterion(int id, const std::string& label, double budget_seconds,
                   Fn&& fn) {
  Criterion c{id, label};
  auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.passed = false;
    c.notes.push_back(std::string("exception: ") + e.what());
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (secs > budget_seconds) {
    c.passed = false;
    c.notes.push_back("runtime " + format_double(secs) + " s exceeds " +
                      format_double(budget_seconds) + " s");
  }
  std::printf("%s  criterion %d: %s (%.1f s)\n", c.passed ? "PASS" : "FAIL",
              id, label.c_str(), secs);
  for (const std::string& n : c.notes) {
    std::printf("      - %s\n", n.c_str());
  }
  if (!c.passed) ++g_failures;
}

fs::path work_dir() {
  fs::path p = fs::temp_directory_path() / "voxelsoft_acceptance";
  return p;
}

RobotDesign area_bot() {
  RobotDesign d;
  d.morphology.width = 3;
  d.morphology.height = 3;
  d.morphology.cells = {kSoft,      kActuatorV, kSoft,
                        kActuatorH, kSoft,      kActuatorH,
                        kSoft,      kActuatorV, kSoft};
  d.stiffness = StiffnessField(3, 3, 1.0);
  d.id = "area_bot";
  return d;
}

// --------------------------------------------------------------------------
// 1. stiffness rule oracle

// Closed-form recomputation straight from the design grid: diagonals use
// the local factor, shared edges the average of both owners, boundary
// edges the single owner.
void criterion_stiffness_oracle(Criterion& c) {
  Rng rng(20240801);
  SimParams params;
  int springs_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int w = rng.uniform_int(1, 5);
    int h = rng.uniform_int(1, 5);
    RobotDesign d;
    d.morphology = random_morphology(w, h, 0.6, rng);
    d.stiffness = StiffnessField(w, h, 1.0);
    for (double& v : d.stiffness.values) v = rng.uniform(0.5, 2.0);
    d.id = "oracle";
    MassSpringSystem sys = assemble(d, params);

    auto base = [&](int i, int j) {
      return d.morphology.at(i, j) == kRigid
                 ? params.rigid_stiffness_ratio * params.k_base_soft
                 : params.k_base_soft;
    };
    auto node = [&](int m) {
      const Vec2& p = sys.masses[size_t(m)].position;
      return std::pair{int(std::lround(p.x / params.voxel_size)),
                       int(std::lround(p.y / params.voxel_size))};
    };
    // edge key -> (k_base, factor) per owner, rebuilt from the grid alone
    std::map<std::pair<std::pair<int, int>, std::pair<int, int>>,
             std::vector<std::pair<double, double>>>
        owners;
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!d.morphology.occupied(i, j)) continue;
        std::pair<int, int> bl{i, j}, br{i + 1, j}, tl{i, j + 1},
            tr{i + 1, j + 1};
        for (auto [a, b] : {std::pair{bl, br}, std::pair{tl, tr},
                            std::pair{bl, tl}, std::pair{br, tr}}) {
          auto key = a < b ? std::pair{a, b} : std::pair{b, a};
          owners[key].emplace_back(base(i, j), d.stiffness.at(i, j));
        }
      }
    }
    for (const Spring& s : sys.springs) {
      double expected = 0.0;
      if (s.kind == SpringKind::kDiagonal) {
        auto na = node(s.a), nb = node(s.b);
        int vi = std::min(na.first, nb.first);
        int vj = std::min(na.second, nb.second);
        expected = d.stiffness.at(vi, vj) * base(vi, vj);
      } else {
        auto na = node(s.a), nb = node(s.b);
        auto key = na < nb ? std::pair{na, nb} : std::pair{nb, na};
        const auto& own = owners.at(key);
        if (own.size() == 1) {
          expected = own[0].second * own[0].first;
        } else {
          expected = 0.5 * (own[0].second + own[1].second) * 0.5 *
                     (own[0].first + own[1].first);
        }
      }
      double rel = std::abs(s.k_effective - expected) / expected;
      c.check(rel < 1e-12, "spring constant off by rel " +
                               format_double(rel) + " in trial " +
                               std::to_string(trial));
      ++springs_checked;
      if (!c.passed) return;
    }
  }
  c.check(springs_checked > 1000, "too few springs exercised");
}

// --------------------------------------------------------------------------
// 2. physics sanity

void criterion_physics_sanity(Criterion& c) {
  RobotDesign d;
  d.morphology.width = 2;
  d.morphology.height = 2;
  d.morphology.cells = {kSoft, kActuatorV, kSoft, kSoft};
  d.stiffness = StiffnessField(2, 2, 1.0);
  d.id = "block";

  SimParams params;
  params.gravity = 0.0;
  params.spring_damping = 0.0;
  params.dt = 1e-3;
  Terrain nowhere;
  nowhere.flat_height = -1e9;

  // momentum, no external forces
  {
    MassSpringSystem sys = assemble(d, params);
    SimState st = make_state(sys);
    Rng rng(5);
    for (Vec2& v : st.velocities) {
      v.x = 0.4 + 0.01 * rng.gaussian();
      v.y = 0.2 + 0.01 * rng.gaussian();
    }
    Vec2 p0 = total_momentum(sys, st);
    std::vector<double> neutral(sys.actuators.size(), 1.0);
    for (int k = 0; k < 1000; ++k) step(sys, st, neutral, params, nowhere);
    double drift = (total_momentum(sys, st) - p0).norm() / p0.norm();
    c.check(drift < 1e-9,
            "momentum drift " + format_double(drift) + " >= 1e-9");
  }

  // undamped energy drift < 1%
  SimState damped_start;
  {
    MassSpringSystem sys = assemble(d, params);
    SimState st = make_state(sys);
    Rng rng(17);
    for (size_t i = 0; i < st.velocities.size(); ++i) {
      st.velocities[i] = Vec2(1.0, 0.0);
      st.positions[i].x += 5e-4 * rng.gaussian();
      st.positions[i].y += 5e-4 * rng.gaussian();
    }
    damped_start = st;
    std::vector<double> neutral(sys.actuators.size(), 1.0);
    double e0 = kinetic_energy(sys, st) + elastic_energy(sys, st);
    for (int k = 0; k < 1000; ++k) step(sys, st, neutral, params, nowhere);
    double e1 = kinetic_energy(sys, st) + elastic_energy(sys, st);
    double drift = std::abs(e1 - e0) / e0;
    c.check(drift < 0.01,
            "undamped energy drift " + format_double(drift) + " >= 1%");
  }

  // damped energy strictly decreasing endpoint-to-endpoint
  {
    SimParams dp = params;
    dp.spring_damping = 2.0;
    MassSpringSystem sys = assemble(d, dp);
    SimState st = damped_start;
    std::vector<double> neutral(sys.actuators.size(), 1.0);
    double e0 = kinetic_energy(sys, st) + elastic_energy(sys, st);
    for (int k = 0; k < 1000; ++k) step(sys, st, neutral, dp, nowhere);
    double e1 = kinetic_energy(sys, st) + elastic_energy(sys, st);
    c.check(e1 < e0, "damped energy did not decrease: " +
                         format_double(e0) + " -> " + format_double(e1));
  }
}

// --------------------------------------------------------------------------
// 3. stiffness monotonicity + reactive/invariant equivalence

double cantilever_tip_drop(double stiffness, Criterion& c) {
  RobotDesign d;
  d.morphology.width = 3;
  d.morphology.height = 1;
  d.morphology.cells = {kSoft, kSoft, kActuatorH};
  d.stiffness = StiffnessField(3, 1, stiffness);
  d.id = "beam";
  SimParams params;
  MassSpringSystem sys = assemble(d, params);
  for (PointMass& m : sys.masses) {
    if (m.position.x == 0.0) m.fixed = true;
  }
  SimState st = make_state(sys);
  double tip0 = 0.0;
  int n_tip = 0;
  for (size_t i = 0; i < sys.masses.size(); ++i) {
    if (sys.masses[i].position.x == 3 * params.voxel_size) {
      tip0 += st.positions[i].y;
      ++n_tip;
    }
  }
  Terrain nowhere;
  nowhere.flat_height = -1e9;
  SettleResult res = settle(sys, st, params, nowhere, 200000, 1e-6);
  c.check(res.converged, "cantilever did not settle");
  double tip1 = 0.0;
  for (size_t i = 0; i < sys.masses.size(); ++i) {
    if (sys.masses[i].position.x == 3 * params.voxel_size) {
      tip1 += res.state.positions[i].y;
    }
  }
  return (tip0 - tip1) / n_tip;
}

void criterion_stiffness_monotonicity(Criterion& c) {
  double soft = cantilever_tip_drop(0.5, c);
  double mid = cantilever_tip_drop(1.0, c);
  double stiff = cantilever_tip_drop(2.0, c);
  c.check(soft > mid && mid > stiff,
          "deflections not strictly decreasing: " + format_double(soft) +
              ", " + format_double(mid) + ", " + format_double(stiff));

  // reactive all-ones vs invariant all-ones, bit-exact trajectories
  RobotDesign d;
  d.morphology.width = 2;
  d.morphology.height = 2;
  d.morphology.cells = {kActuatorH, kSoft, kSoft, kActuatorV};
  d.stiffness = StiffnessField(2, 2, 1.0);
  d.id = "pair";
  SimParams params;
  MassSpringSystem sys_inv = assemble(d, params);
  MassSpringSystem sys_re = assemble(d, params);
  SimState st_inv = make_state(sys_inv);
  SimState st_re = make_state(sys_re);
  for (Vec2& p : st_inv.positions) p.y += 0.01;
  for (Vec2& p : st_re.positions) p.y += 0.01;
  Terrain flat;
  std::vector<double> ones(sys_re.voxels.size(), 1.0);
  bool identical = true;
  for (int k = 0; k < 3000; ++k) {
    double phase = 2.0 * std::numbers::pi * k / 250.0;
    std::vector<double> act{1.1 + 0.4 * std::sin(phase),
                            1.1 - 0.4 * std::cos(phase)};
    set_reactive_stiffness(sys_re, ones, params);
    step(sys_re, st_re, act, params, flat);
    step(sys_inv, st_inv, act, params, flat);
  }
  for (size_t i = 0; i < st_inv.positions.size(); ++i) {
    identical = identical && st_inv.positions[i].x == st_re.positions[i].x &&
                st_inv.positions[i].y == st_re.positions[i].y &&
                st_inv.velocities[i].x == st_re.velocities[i].x &&
                st_inv.velocities[i].y == st_re.velocities[i].y;
  }
  c.check(identical,
          "reactive all-ones trajectory differs from invariant S=1");
}

// --------------------------------------------------------------------------
// 4. trainer correctness

void criterion_trainer_gradients(Criterion& c) {
  Rng rng(4242);
  MlpPolicy ref(1, 1, {});
  ref.init_weights(rng);
  UpdateBatch batch;
  for (int s = 0; s < 10; ++s) {
    std::vector<double> obs{rng.gaussian()};
    MlpPolicy::Forward f = ref.forward(obs);
    std::vector<double> a = f.mu;
    a[0] += std::exp(ref.log_std(0)) * rng.gaussian();
    batch.log_probs_old.push_back(ref.log_prob(f.mu, a));
    batch.observations.push_back(std::move(obs));
    batch.raw_actions.push_back(std::move(a));
    batch.advantages.push_back(rng.gaussian());
    batch.returns.push_back(rng.gaussian());
  }
  MlpPolicy p = ref;
  for (double& v : p.theta) v += 0.05 * rng.gaussian();

  TrainConfig cfg;
  cfg.entropy_coef = 0.0;  // clipped surrogate + value loss
  std::vector<size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::vector<double> grad;
  ppo_loss(p, batch, idx, cfg, &grad);

  const double h = 1e-5;
  double worst = 0.0;
  for (size_t k = 0; k < p.theta.size(); ++k) {
    MlpPolicy plus = p, minus = p;
    plus.theta[k] += h;
    minus.theta[k] -= h;
    double fd = (ppo_loss(plus, batch, idx, cfg).total -
                 ppo_loss(minus, batch, idx, cfg).total) /
                (2.0 * h);
    double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-4});
    worst = std::max(worst, std::abs(grad[k] - fd) / denom);
  }
  c.check(worst < 1e-4, "finite-difference mismatch: worst rel err " +
                            format_double(worst));

  // lr = 0 is the identity update
  MlpPolicy p2 = ref;
  UpdateBatch b2 = batch;
  TrainConfig zero;
  zero.learning_rate = 0.0;
  zero.minibatch = 4;
  AdamState adam(p2.theta.size());
  Rng urng(3);
  std::vector<double> before = p2.theta;
  ppo_update(p2, b2, zero, adam, urng);
  c.check(p2.theta == before, "lr=0 update changed parameters");
}

// --------------------------------------------------------------------------
// 5. monotone operators

void criterion_monotone_operators(Criterion& c) {
  // material local search on 20 random controllers
  TaskSpec task = make_task(TaskId::kAreaMaximizer, 30);
  RobotDesign d = area_bot();
  Env probe(task, d, ControlMode::kInvariant, 1);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    MlpPolicy p(probe.observation_dim(), probe.action_dim(), {8});
    Rng rng(seed * 7 + 1);
    p.init_weights(rng);
    double initial = evaluate(task, d, ControlMode::kInvariant, p, 1);
    LocalSearchResult r =
        material_local_search(task, d, p, initial, 3, 0.25, seed);
    c.check(r.fitness >= initial,
            "local search decreased fitness at seed " +
                std::to_string(seed));
  }

  // elitist smoke run: pop 8, 5 generations
  EvolutionConfig cfg;
  cfg.population = 8;
  cfg.survivors = 2;
  cfg.generations = 5;
  cfg.inner_budget = 1;
  cfg.paradigm = Paradigm::kReactive;
  cfg.seed = 2024;
  TrainConfig tc;
  tc.rollout_ticks = 60;
  tc.minibatch = 30;
  tc.epochs = 2;
  tc.hidden = {8};
  CodesignResult r =
      run_reactive_codesign(cfg, make_task(TaskId::kWalker, 30), tc);
  c.check(r.logs.size() == 5, "expected 5 generation logs");
  double prev = -1e300;
  for (const GenerationLog& log : r.logs) {
    double best = -1e300;
    for (const GenerationEntry& e : log.entries)
      best = std::max(best, e.fitness);
    c.check(best >= prev, "best-per-generation decreased at generation " +
                              std::to_string(log.generation));
    prev = best;
  }
}

// --------------------------------------------------------------------------
// 6. directional reproduction: co-optimization vs control-only

void criterion_directional(Criterion& c) {
  RobotDesign d = area_bot();
  SimParams sim;
  sim.k_base_soft = 500.0;  // compliant enough that stiffness choice matters
  TaskSpec task = make_task(TaskId::kAreaMaximizer, 100);
  TrainConfig tc;
  tc.learning_rate = 3e-3;
  tc.epochs = 10;
  tc.rollout_ticks = 2000;
  tc.minibatch = 250;

  double co_mean = 0.0, ctrl_mean = 0.0;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    double co = train_inner(task, d, ControlMode::kReactive, 50, seed, tc,
                            sim)
                    .fitness;
    double ctrl = train_inner(task, d, ControlMode::kInvariant, 50, seed, tc,
                              sim)
                      .fitness;
    c.notes.push_back("seed " + std::to_string(seed) + ": co-opt " +
                      format_double(co) + ", control-only " +
                      format_double(ctrl));
    co_mean += co / 3.0;
    ctrl_mean += ctrl / 3.0;
  }
  c.notes.push_back("mean: co-opt " + format_double(co_mean) +
                    ", control-only " + format_double(ctrl_mean));
  c.check(co_mean >= ctrl_mean,
          "co-optimization mean fell below control-only");
}

// --------------------------------------------------------------------------
// 7. ablation wiring equivalences

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

void criterion_ablation_wiring(Criterion& c) {
  fs::path base = work_dir() / "ablation";
  fs::remove_all(base);

  nlohmann::json j{
      {"task", "walker"},
      {"paradigm", "invariant"},
      {"seeds", {11}},
      {"out_dir", (base / "invariant").string()},
      {"evolution",
       {{"population", 4},
        {"generations", 2},
        {"survivors", 2},
        {"inner_budget", 1},
        {"finetune_budget", 1},
        {"material_sigma", 0.0},
        {"local_search_iters", 0}}},
      {"train",
       {{"rollout_ticks", 40},
        {"minibatch", 20},
        {"epochs", 2},
        {"hidden", {8}}}},
      {"env", {{"episode_ticks", 20}}}};
  run_experiment(parse_experiment_config(j));

  j["paradigm"] = "prescribed_material";
  j["out_dir"] = (base / "prescribed").string();
  run_experiment(parse_experiment_config(j));

  for (const char* name : {"gen_000.json", "gen_001.json"}) {
    bool same = slurp(base / "invariant" / "seed_11" / name) ==
                slurp(base / "prescribed" / "seed_11" / name);
    c.check(same, std::string("generation log differs: ") + name);
  }
  bool curves_same = slurp(base / "invariant" / "curves.csv") ==
                     slurp(base / "prescribed" / "curves.csv");
  c.check(curves_same, "curves.csv differ between the two paradigms");

  // fixed-material replays must emit constant unit stiffness
  nlohmann::json fj{
      {"task", "walker"},
      {"paradigm", "fixed_material"},
      {"seeds", {3}},
      {"out_dir", (base / "fixed").string()},
      {"evolution",
       {{"population", 2},
        {"generations", 1},
        {"survivors", 1},
        {"inner_budget", 1}}},
      {"train",
       {{"rollout_ticks", 40},
        {"minibatch", 20},
        {"epochs", 2},
        {"hidden", {8}}}},
      {"env", {{"episode_ticks", 20}}}};
  run_experiment(parse_experiment_config(fj));
  replay((base / "fixed" / "seed_3" / "best_design.json").string(),
         (base / "fixed" / "seed_3" / "best_controller.json").string(),
         TaskId::kWalker, 10, (base / "fixed" / "replay").string());
  std::istringstream ss(slurp(base / "fixed" / "replay" / "stiffness.csv"));
  std::string line;
  std::getline(ss, line);  // header
  bool all_unit = true;
  int rows = 0;
  while (std::getline(ss, line)) {
    double f = std::stod(line.substr(line.rfind(',') + 1));
    all_unit = all_unit && f == 1.0;
    ++rows;
  }
  c.check(rows > 0, "empty stiffness CSV");
  c.check(all_unit, "fixed-material replay emitted non-unit stiffness");
}

// --------------------------------------------------------------------------
// 8. determinism and performance

void criterion_determinism_performance(Criterion& c) {
  fs::path base = work_dir() / "determinism";
  fs::remove_all(base);
  nlohmann::json j{
      {"task", "area_maximizer"},
      {"paradigm", "reactive"},
      {"seeds", {21}},
      {"out_dir", (base / "a").string()},
      {"evolution",
       {{"population", 3},
        {"generations", 2},
        {"survivors", 1},
        {"inner_budget", 1}}},
      {"train",
       {{"rollout_ticks", 40},
        {"minibatch", 20},
        {"epochs", 2},
        {"hidden", {8}}}},
      {"env", {{"episode_ticks", 20}}}};
  run_experiment(parse_experiment_config(j));
  j["out_dir"] = (base / "b").string();
  run_experiment(parse_experiment_config(j));

  c.check(slurp(base / "a" / "curves.csv") == slurp(base / "b" / "curves.csv"),
          "curves.csv differ across repeated runs");
  for (const char* name : {"gen_000.json", "gen_001.json"}) {
    c.check(slurp(base / "a" / "seed_21" / name) ==
                slurp(base / "b" / "seed_21" / name),
            std::string("generation log differs across runs: ") + name);
  }
  c.check(slurp(base / "a" / "seed_21" / "best_controller.json") ==
              slurp(base / "b" / "seed_21" / "best_controller.json"),
          "controller checkpoints differ across runs");

  // single-threaded 500-tick episode of a 3x3 robot: < 250 ms
  RobotDesign d = area_bot();
  TaskSpec task = make_task(TaskId::kWalker, 500);
  Env env(task, d, ControlMode::kReactive, 1);
  MlpPolicy p(env.observation_dim(), env.action_dim(), {64, 64});
  Rng rng(1);
  p.init_weights(rng);
  env.reset();
  auto t0 = std::chrono::steady_clock::now();
  while (!env.done()) {
    PolicyOutput out = p.act(env.observation(), false, nullptr);
    MappedAction m = map_action(out.action, ControlMode::kReactive,
                                env.n_actuators(), env.n_occupied());
    std::vector<double> cmd = m.actuation;
    cmd.insert(cmd.end(), m.stiffness.begin(), m.stiffness.end());
    env.step(cmd);
  }
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  c.notes.push_back("episode wall time " + format_double(ms) + " ms");
  c.check(env.state().step_count == 5000, "episode did not run 5000 steps");
  c.check(ms < 250.0, "episode exceeded 250 ms");
}

}  // namespace

int main() {
  std::printf("voxelsoft acceptance suite\n");
  run_criterion(1, "stiffness rule oracle on randomized designs", 5.0,
                criterion_stiffness_oracle);
  run_criterion(2, "momentum and energy sanity", 30.0,
                criterion_physics_sanity);
  run_criterion(3, "stiffness monotonicity and reactive equivalence", 60.0,
                criterion_stiffness_monotonicity);
  run_criterion(4, "trainer gradients vs finite differences", 10.0,
                criterion_trainer_gradients);
  run_criterion(5, "monotone search operators", 600.0,
                criterion_monotone_operators);
  run_criterion(6, "co-optimization vs control-only ordering", 1800.0,
                criterion_directional);
  run_criterion(7, "ablation wiring equivalences", 300.0,
                criterion_ablation_wiring);
  run_criterion(8, "determinism and episode performance", 600.0,
                criterion_determinism_performance);
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
