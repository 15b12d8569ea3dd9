#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "voxelsoft/common.hpp"
#include "voxelsoft/design.hpp"
#include "voxelsoft/env.hpp"
#include "voxelsoft/policy.hpp"
#include "voxelsoft/ppo.hpp"

namespace voxelsoft {

// ---------------------------------------------------------------------------
// configuration

enum class Paradigm {
  kReactive,            // morphology outer loop, stiffness in the action
  kInvariant,           // joint <morphology, stiffness> outer loop
  kFixedMaterial,       // reactive wiring, motor-only policy, S = 1
  kPrescribedMaterial,  // invariant wiring with S locked at 1
};

inline const char* paradigm_name(Paradigm p) {
  switch (p) {
    case Paradigm::kReactive: return "reactive";
    case Paradigm::kInvariant: return "invariant";
    case Paradigm::kFixedMaterial: return "fixed_material";
    case Paradigm::kPrescribedMaterial: return "prescribed_material";
  }
  return "?";
}

inline Paradigm paradigm_from_name(const std::string& name) {
  for (Paradigm p : {Paradigm::kReactive, Paradigm::kInvariant,
                     Paradigm::kFixedMaterial, Paradigm::kPrescribedMaterial}) {
    if (name == paradigm_name(p)) return p;
  }
  throw ConfigError("unknown paradigm `" + name + "`");
}

struct EvolutionConfig {
  int population = 8;
  int generations = 5;
  int survivors = 2;
  double morph_mutation_rate = 0.1;
  double material_sigma = 0.1;
  int local_search_iters = 5;
  int inner_budget = 10;     // ppo updates per newly trained individual
  int finetune_budget = 5;   // ppo updates per survivor after local search
  Paradigm paradigm = Paradigm::kReactive;
  uint64_t seed = 1;
  int grid_width = 3;
  int grid_height = 3;
  double init_occupancy = 0.6;
};

inline void validate_config(const EvolutionConfig& cfg) {
  if (cfg.population < 1) throw ConfigError("population must be >= 1");
  if (cfg.survivors < 1 || cfg.survivors > cfg.population)
    throw ConfigError("survivors must be in [1, population]");
  if (cfg.generations < 1) throw ConfigError("generations must be >= 1");
  if (cfg.inner_budget < 0 || cfg.finetune_budget < 0 ||
      cfg.local_search_iters < 0)
    throw ConfigError("budgets must be >= 0");
  if (cfg.morph_mutation_rate < 0.0 || cfg.morph_mutation_rate > 1.0)
    throw ConfigError("morph_mutation_rate must be in [0, 1]");
  if (cfg.material_sigma < 0.0)
    throw ConfigError("material_sigma must be >= 0");
  if (cfg.grid_width < 1 || cfg.grid_height < 1)
    throw ConfigError("grid dimensions must be >= 1");
}

// ---------------------------------------------------------------------------
// population

struct Individual {
  int id = -1;
  int parent_id = -1;
  int generation_born = 0;
  RobotDesign design;
  std::optional<MlpPolicy> controller;
  std::optional<double> fitness;
};

struct GenerationEntry {
  int id = -1;
  int parent_id = -1;
  double fitness = 0.0;
  RobotDesign design;
};

struct GenerationLog {
  int generation = 0;
  uint64_t seed = 0;
  std::vector<GenerationEntry> entries;  // population order
  int best_id = -1;
};

struct CodesignResult {
  Individual best;
  std::vector<GenerationLog> logs;
};

// ---------------------------------------------------------------------------
// variation operators

namespace detail {

inline bool morphology_valid(const Morphology& m) {
  RobotDesign d;
  d.morphology = m;
  d.stiffness = StiffnessField(m.width, m.height, 1.0);
  return validate_design(d).ok();
}

}  // namespace detail

// Samples a random valid morphology: independent occupancy per cell, then
// repair — keep the largest 4-connected component (ties: the one found
// first in row-major order) and force an actuator if none survived.
inline Morphology random_morphology(int width, int height, double occupancy,
                                    Rng& rng) {
  Morphology m(width, height);
  for (uint8_t& c : m.cells) {
    c = rng.uniform() < occupancy ? uint8_t(rng.uniform_int(1, 4))
                                  : uint8_t(0);
  }
  if (m.occupied_count() == 0) {
    int i = rng.uniform_int(0, width - 1);
    int j = rng.uniform_int(0, height - 1);
    m.at(i, j) = uint8_t(rng.uniform_int(3, 4));
  }

  // component labels
  std::vector<int> label(m.cells.size(), -1);
  std::vector<int> comp_size;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      if (!m.occupied(i, j) || label[size_t(j) * width + i] >= 0) continue;
      int comp = int(comp_size.size());
      comp_size.push_back(0);
      std::vector<std::pair<int, int>> stack{{i, j}};
      label[size_t(j) * width + i] = comp;
      while (!stack.empty()) {
        auto [ci, cj] = stack.back();
        stack.pop_back();
        ++comp_size[size_t(comp)];
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int ni = ci + di[k], nj = cj + dj[k];
          if (m.in_bounds(ni, nj) && m.occupied(ni, nj) &&
              label[size_t(nj) * width + ni] < 0) {
            label[size_t(nj) * width + ni] = comp;
            stack.emplace_back(ni, nj);
          }
        }
      }
    }
  }
  int keep = int(std::max_element(comp_size.begin(), comp_size.end()) -
                 comp_size.begin());
  std::vector<int> kept_cells;
  for (size_t k = 0; k < m.cells.size(); ++k) {
    if (m.cells[k] != kEmpty && label[k] != keep) m.cells[k] = kEmpty;
    if (m.cells[k] != kEmpty) kept_cells.push_back(int(k));
  }
  if (m.actuator_count() == 0) {
    int pick = kept_cells[size_t(rng.uniform_int(0, int(kept_cells.size()) - 1))];
    m.cells[size_t(pick)] = uint8_t(rng.uniform_int(3, 4));
  }
  return m;
}

// Each cell is independently resampled uniformly over {0..4} with the given
// rate; the whole draw is retried until the result is valid. After 100
// attempts the input is returned unchanged and `exhausted` is set.
inline Morphology mutate_morphology(const Morphology& m, double rate, Rng& rng,
                                    bool* exhausted = nullptr) {
  if (exhausted) *exhausted = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Morphology cand = m;
    for (uint8_t& c : cand.cells) {
      if (rng.uniform() < rate) c = uint8_t(rng.uniform_int(0, 4));
    }
    if (detail::morphology_valid(cand)) return cand;
  }
  if (exhausted) *exhausted = true;
  return m;
}

// Per-cell additive Gaussian noise, clamped to the legal range. sigma = 0 is
// an exact no-op and consumes no randomness.
inline StiffnessField mutate_material(const StiffnessField& s, double sigma,
                                      Rng& rng) {
  if (sigma == 0.0) return s;
  StiffnessField out = s;
  for (double& v : out.values)
    v = clamp_stiffness_value(v + rng.gaussian(0.0, sigma));
  return out;
}

// ---------------------------------------------------------------------------
// evaluation and inner-loop training

// Fixed base seed for fitness evaluations, shared by all individuals so
// that fitness values are comparable and local-search acceptance is
// well-defined.
constexpr uint64_t kEvalSeed = 0x5eed0001ULL;

namespace detail {

inline double deterministic_episode(Env& env, const MlpPolicy& frozen) {
  env.reset();
  double ep = 0.0;
  while (!env.done()) {
    PolicyOutput out = frozen.act(env.observation(), false, nullptr);
    MappedAction mapped = map_action(out.action, env.mode(),
                                     env.n_actuators(), env.n_occupied());
    std::vector<double> cmd = mapped.actuation;
    cmd.insert(cmd.end(), mapped.stiffness.begin(), mapped.stiffness.end());
    ep += env.step(cmd).reward;
  }
  return ep;
}

}  // namespace detail

// Mean undiscounted return of the deterministic policy over fixed-seed
// episodes. A diverged episode is retried once with a perturbed seed; if
// the retry diverges too, the original truncated return counts.
inline double evaluate(const TaskSpec& task, const RobotDesign& design,
                       ControlMode mode, const MlpPolicy& policy,
                       int episodes, const SimParams& sim = {},
                       uint64_t eval_seed = kEvalSeed) {
  Env env(task, design, mode, eval_seed, sim);
  if (policy.obs_dim() != env.observation_dim() ||
      policy.act_dim() != env.action_dim()) {
    throw IncompatibleController(
        "controller dimensions do not match the environment");
  }
  MlpPolicy frozen = policy;
  frozen.norm.frozen = true;
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    double ep = detail::deterministic_episode(env, frozen);
    if (env.diverged()) {
      Env retry(task, design, mode,
                eval_seed + 1000003ULL * uint64_t(e + 1), sim);
      double ep2 = detail::deterministic_episode(retry, frozen);
      if (!retry.diverged()) ep = ep2;
    }
    total += ep;
  }
  return total / double(episodes);
}

struct TrainResult {
  MlpPolicy policy;
  double fitness = 0.0;
};

// Runs `budget` rollout/update rounds and returns the best-evaluated
// snapshot (the initial policy counts as the first snapshot, so the result
// never scores below it). An aborted update leaves the last finite
// parameters in place and training continues.
inline TrainResult train_inner(const TaskSpec& task, const RobotDesign& design,
                               ControlMode mode, int budget, uint64_t seed,
                               const TrainConfig& tcfg,
                               const SimParams& sim = {},
                               std::optional<MlpPolicy> initial = {}) {
  Rng rng(derive_seed(seed, 0xA11));
  Env env(task, design, mode, seed, sim);
  MlpPolicy policy;
  if (initial) {
    if (initial->obs_dim() != env.observation_dim() ||
        initial->act_dim() != env.action_dim()) {
      throw IncompatibleController(
          "inherited controller does not match the environment");
    }
    policy = std::move(*initial);
  } else {
    policy = MlpPolicy(env.observation_dim(), env.action_dim(), tcfg.hidden);
    policy.init_weights(rng);
  }

  TrainResult best{policy, evaluate(task, design, mode, policy,
                                    tcfg.eval_episodes, sim)};
  AdamState adam(policy.theta.size());
  for (int u = 0; u < budget; ++u) {
    Trajectory traj = collect_rollout(env, policy, tcfg.rollout_ticks, rng);
    UpdateBatch batch =
        build_batch({traj}, tcfg.gamma, tcfg.gae_lambda);
    ppo_update(policy, batch, tcfg, adam, rng);
    double fit =
        evaluate(task, design, mode, policy, tcfg.eval_episodes, sim);
    if (fit > best.fitness) {
      best.policy = policy;
      best.fitness = fit;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// material local search
//
// Hill climbing over the stiffness field with a frozen controller:
// perturb, zero-shot evaluate, accept only strict improvements.

struct LocalSearchResult {
  StiffnessField field;
  double fitness = 0.0;
};

inline LocalSearchResult material_local_search(
    const TaskSpec& task, const RobotDesign& design, const MlpPolicy& policy,
    double current_fitness, int iters, double sigma, uint64_t seed,
    int eval_episodes = 1, const SimParams& sim = {}) {
  LocalSearchResult res{design.stiffness, current_fitness};
  if (iters == 0) return res;
  Rng rng(seed);
  RobotDesign candidate = design;
  for (int it = 0; it < iters; ++it) {
    candidate.stiffness = mutate_material(res.field, sigma, rng);
    double fit = evaluate(task, candidate, ControlMode::kInvariant, policy,
                          eval_episodes, sim);
    if (fit > res.fitness) {
      res.field = candidate.stiffness;
      res.fitness = fit;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// the bi-level loop

namespace detail {

// rng stream salts
constexpr uint64_t kInitSalt = 1;
constexpr uint64_t kTrainSalt = 2;
constexpr uint64_t kLocalSearchSalt = 3;
constexpr uint64_t kFinetuneSalt = 4;
constexpr uint64_t kMutationSalt = 5;

constexpr double kUnfitFitness = -1e9;  // e.g. spawn collision on this task

struct Wiring {
  ControlMode inner_mode = ControlMode::kReactive;
  bool material_outer = false;  // S mutation + local search + fine-tune
};

inline Wiring wiring_for(Paradigm p) {
  switch (p) {
    case Paradigm::kReactive:
      return {ControlMode::kReactive, false};
    case Paradigm::kFixedMaterial:
      return {ControlMode::kInvariant, false};
    case Paradigm::kInvariant:
    case Paradigm::kPrescribedMaterial:
      return {ControlMode::kInvariant, true};
  }
  return {};
}

inline CodesignResult run_evolution(const EvolutionConfig& cfg,
                                    const TaskSpec& task,
                                    const TrainConfig& tcfg,
                                    const SimParams& sim) {
  validate_config(cfg);
  Wiring wiring = wiring_for(cfg.paradigm);
  double sigma = cfg.paradigm == Paradigm::kPrescribedMaterial
                     ? 0.0
                     : cfg.material_sigma;
  int ls_iters = cfg.paradigm == Paradigm::kPrescribedMaterial
                     ? 0
                     : cfg.local_search_iters;

  int next_id = 0;
  std::vector<Individual> pop;
  pop.reserve(size_t(cfg.population));
  Rng init_rng(derive_seed(cfg.seed, kInitSalt));
  for (int n = 0; n < cfg.population; ++n) {
    Individual ind;
    ind.id = next_id++;
    ind.design.morphology = random_morphology(
        cfg.grid_width, cfg.grid_height, cfg.init_occupancy, init_rng);
    ind.design.stiffness =
        StiffnessField(cfg.grid_width, cfg.grid_height, 1.0);
    ind.design.id = std::to_string(ind.id);
    pop.push_back(std::move(ind));
  }

  Individual best;
  bool have_best = false;
  std::vector<GenerationLog> logs;

  for (int gen = 0; gen < cfg.generations; ++gen) {
    // inner loop: train every individual that has no fitness yet
    std::vector<int> todo;
    for (int i = 0; i < int(pop.size()); ++i)
      if (!pop[i].fitness) todo.push_back(i);
    parallel_for(int(todo.size()), [&](int k) {
      Individual& ind = pop[size_t(todo[size_t(k)])];
      uint64_t s = derive_seed(cfg.seed, uint64_t(gen), uint64_t(ind.id),
                               kTrainSalt);
      try {
        TrainResult r = train_inner(task, ind.design, wiring.inner_mode,
                                    cfg.inner_budget, s, tcfg, sim);
        ind.controller = std::move(r.policy);
        ind.fitness = r.fitness;
      } catch (const SpawnCollision&) {
        ind.fitness = kUnfitFitness;
      }
    });

    // selection: fitness descending, ties to the lower id
    std::vector<int> order(pop.size());
    for (int i = 0; i < int(pop.size()); ++i) order[size_t(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double fa = *pop[size_t(a)].fitness, fb = *pop[size_t(b)].fitness;
      if (fa != fb) return fa > fb;
      return pop[size_t(a)].id < pop[size_t(b)].id;
    });
    std::vector<int> survivors(order.begin(),
                               order.begin() + cfg.survivors);

    // outer-loop material phase for survivors
    if (wiring.material_outer) {
      parallel_for(int(survivors.size()), [&](int k) {
        Individual& ind = pop[size_t(survivors[size_t(k)])];
        if (!ind.controller) return;
        if (ls_iters > 0) {
          LocalSearchResult ls = material_local_search(
              task, ind.design, *ind.controller, *ind.fitness, ls_iters,
              sigma,
              derive_seed(cfg.seed, uint64_t(gen), uint64_t(ind.id),
                          kLocalSearchSalt),
              tcfg.eval_episodes, sim);
          ind.design.stiffness = ls.field;
          ind.fitness = ls.fitness;
        }
        if (cfg.finetune_budget > 0) {
          TrainResult ft = train_inner(
              task, ind.design, ControlMode::kInvariant,
              cfg.finetune_budget,
              derive_seed(cfg.seed, uint64_t(gen), uint64_t(ind.id),
                          kFinetuneSalt),
              tcfg, sim, *ind.controller);
          ind.controller = std::move(ft.policy);
          ind.fitness = ft.fitness;
        }
      });
    }

    // log the evaluated population
    GenerationLog glog;
    glog.generation = gen;
    glog.seed = cfg.seed;
    int best_idx = -1;
    for (int i = 0; i < int(pop.size()); ++i) {
      const Individual& ind = pop[size_t(i)];
      glog.entries.push_back(
          {ind.id, ind.parent_id, *ind.fitness, ind.design});
      if (best_idx < 0 || *ind.fitness > *pop[size_t(best_idx)].fitness ||
          (*ind.fitness == *pop[size_t(best_idx)].fitness &&
           ind.id < pop[size_t(best_idx)].id)) {
        best_idx = i;
      }
    }
    glog.best_id = pop[size_t(best_idx)].id;
    logs.push_back(std::move(glog));

    if (!have_best || *pop[size_t(best_idx)].fitness > *best.fitness) {
      best = pop[size_t(best_idx)];
      have_best = true;
    }

    // refill by mutating survivors
    if (gen + 1 < cfg.generations) {
      Rng mut_rng(derive_seed(cfg.seed, uint64_t(gen), kMutationSalt));
      std::vector<Individual> next;
      next.reserve(size_t(cfg.population));
      for (int s : survivors) next.push_back(std::move(pop[size_t(s)]));
      while (int(next.size()) < cfg.population) {
        const Individual& parent =
            next[size_t(mut_rng.uniform_int(0, cfg.survivors - 1))];
        Individual child;
        child.id = next_id++;
        child.parent_id = parent.id;
        child.generation_born = gen + 1;
        child.design.morphology = mutate_morphology(
            parent.design.morphology, cfg.morph_mutation_rate, mut_rng);
        child.design.stiffness =
            wiring.material_outer
                ? mutate_material(parent.design.stiffness, sigma, mut_rng)
                : parent.design.stiffness;
        child.design.id = std::to_string(child.id);
        child.design.parent_id = parent.design.id;
        next.push_back(std::move(child));
      }
      pop = std::move(next);
    }
  }
  return {std::move(best), std::move(logs)};
}

}  // namespace detail

inline CodesignResult run_reactive_codesign(const EvolutionConfig& cfg,
                                            const TaskSpec& task,
                                            const TrainConfig& tcfg,
                                            const SimParams& sim = {}) {
  if (cfg.paradigm != Paradigm::kReactive)
    throw ConfigError("run_reactive_codesign requires the reactive paradigm");
  return detail::run_evolution(cfg, task, tcfg, sim);
}

inline CodesignResult run_invariant_codesign(const EvolutionConfig& cfg,
                                             const TaskSpec& task,
                                             const TrainConfig& tcfg,
                                             const SimParams& sim = {}) {
  if (cfg.paradigm != Paradigm::kInvariant)
    throw ConfigError(
        "run_invariant_codesign requires the invariant paradigm");
  return detail::run_evolution(cfg, task, tcfg, sim);
}

inline CodesignResult run_ablation(const EvolutionConfig& cfg,
                                   const TaskSpec& task,
                                   const TrainConfig& tcfg,
                                   const SimParams& sim = {}) {
  if (cfg.paradigm != Paradigm::kFixedMaterial &&
      cfg.paradigm != Paradigm::kPrescribedMaterial)
    throw ConfigError("run_ablation requires an ablation paradigm");
  return detail::run_evolution(cfg, task, tcfg, sim);
}

inline CodesignResult run_codesign(const EvolutionConfig& cfg,
                                   const TaskSpec& task,
                                   const TrainConfig& tcfg,
                                   const SimParams& sim = {}) {
  switch (cfg.paradigm) {
    case Paradigm::kReactive:
      return run_reactive_codesign(cfg, task, tcfg, sim);
    case Paradigm::kInvariant:
      return run_invariant_codesign(cfg, task, tcfg, sim);
    default:
      return run_ablation(cfg, task, tcfg, sim);
  }
}

}  // namespace voxelsoft
