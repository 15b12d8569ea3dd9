#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "voxelsoft/common.hpp"
#include "voxelsoft/design.hpp"
#include "voxelsoft/physics.hpp"

namespace voxelsoft {

// ---------------------------------------------------------------------------
// tasks

enum class TaskId {
  kWalker,
  kBridgeWalker,
  kDownStepper,
  kCaveCrawler,
  kAreaMaximizer,
  kAreaMinimizer,
};

inline const char* task_name(TaskId id) {
  switch (id) {
    case TaskId::kWalker: return "walker";
    case TaskId::kBridgeWalker: return "bridge_walker";
    case TaskId::kDownStepper: return "down_stepper";
    case TaskId::kCaveCrawler: return "cave_crawler";
    case TaskId::kAreaMaximizer: return "area_maximizer";
    case TaskId::kAreaMinimizer: return "area_minimizer";
  }
  return "?";
}

inline TaskId task_from_name(const std::string& name) {
  for (TaskId id : {TaskId::kWalker, TaskId::kBridgeWalker,
                    TaskId::kDownStepper, TaskId::kCaveCrawler,
                    TaskId::kAreaMaximizer, TaskId::kAreaMinimizer}) {
    if (name == task_name(id)) return id;
  }
  throw ConfigError("unknown task id `" + name + "`");
}

inline bool is_locomotion_task(TaskId id) {
  return id == TaskId::kWalker || id == TaskId::kBridgeWalker ||
         id == TaskId::kDownStepper || id == TaskId::kCaveCrawler;
}

struct TaskSpec {
  TaskId id = TaskId::kWalker;
  int episode_ticks = 500;      // control ticks per episode
  int control_decimation = 10;  // physics steps per control tick
  Terrain terrain;
  double spawn_x = 0.0;
  double spawn_clearance = 0.02;  // m above ground at placement
  int terrain_samples = 5;
  double probe_spacing_voxels = 0.5;  // probe spacing ahead of the CoM
  bool observe_prev_stiffness = true; // reactive mode only
  long settle_max_steps = 5000;
  double settle_tolerance = 1e-3;  // m/s
};

// Builds the task's terrain at the given voxel scale. Geometry keeps each
// task's physical challenge: flat ground for walking and shape change, a
// compliant "plank" segment for the bridge, three descending steps, and a
// low ceiling passage for the cave.
inline TaskSpec make_task(TaskId id, int episode_ticks = 500,
                          double voxel = 0.1, double passage_height = 0.15) {
  TaskSpec t;
  t.id = id;
  t.episode_ticks = episode_ticks;
  auto grid = [&](double from, double to) {
    t.terrain.origin_x = from;
    t.terrain.cell_width = voxel;
    int n = int(std::ceil((to - from) / voxel));
    t.terrain.heights.assign(size_t(n), 0.0);
    return n;
  };
  switch (id) {
    case TaskId::kWalker:
    case TaskId::kAreaMaximizer:
    case TaskId::kAreaMinimizer:
      break;  // flat ground at 0
    case TaskId::kBridgeWalker: {
      int n = grid(-10 * voxel, 60 * voxel);
      t.terrain.contact_scale.assign(size_t(n), 1.0);
      for (int k = 0; k < n; ++k) {
        double x = t.terrain.origin_x + (k + 0.5) * voxel;
        if (x >= 5 * voxel && x < 15 * voxel)
          t.terrain.contact_scale[size_t(k)] = 0.1;
      }
      break;
    }
    case TaskId::kDownStepper: {
      int n = grid(-10 * voxel, 60 * voxel);
      for (int k = 0; k < n; ++k) {
        double x = t.terrain.origin_x + (k + 0.5) * voxel;
        double h = 3 * voxel;
        if (x >= 6 * voxel) h = 2 * voxel;
        if (x >= 12 * voxel) h = voxel;
        if (x >= 18 * voxel) h = 0.0;
        t.terrain.heights[size_t(k)] = h;
      }
      break;
    }
    case TaskId::kCaveCrawler: {
      int n = grid(-10 * voxel, 60 * voxel);
      t.terrain.ceiling.assign(size_t(n), Terrain::kNoCeiling);
      for (int k = 0; k < n; ++k) {
        double x = t.terrain.origin_x + (k + 0.5) * voxel;
        if (x >= 4.5 * voxel && x < 12.5 * voxel)
          t.terrain.ceiling[size_t(k)] = passage_height;
      }
      break;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// environment

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  std::map<std::string, double> info;
};

// Episodic environment around one assembled robot. Action layout: the first
// n_actuators values are target length ratios; in reactive mode the next
// n_occupied values are stiffness factors. Values are physical (already
// mapped), and are clamped to their legal intervals.
class Env {
 public:
  Env(TaskSpec task, RobotDesign design, ControlMode mode, uint64_t seed,
      SimParams params = {})
      : task_(std::move(task)),
        design_(std::move(design)),
        mode_(mode),
        seed_(seed),
        params_(params) {
    system_ = assemble(design_, params_);

    // place above the highest ground under the footprint
    double dx = task_.spawn_x;
    SimState placed = make_state(system_);
    double ground_max = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : placed.positions)
      ground_max = std::max(ground_max, task_.terrain.ground(p.x + dx));
    double dy = ground_max + task_.spawn_clearance;
    for (Vec2& p : placed.positions) {
      p.x += dx;
      p.y += dy;
    }
    for (const Vec2& p : placed.positions) {
      if (p.y < task_.terrain.ground(p.x) ||
          p.y > task_.terrain.ceiling_at(p.x)) {
        throw SpawnCollision("design does not fit above the spawn terrain");
      }
    }

    initial_factors_.reserve(system_.voxels.size());
    for (const VoxelRef& v : system_.voxels)
      initial_factors_.push_back(v.factor);

    SettleResult settled = settle(system_, std::move(placed), params_,
                                  task_.terrain, task_.settle_max_steps,
                                  task_.settle_tolerance);
    initial_state_ = std::move(settled.state);
    for (Vec2& v : initial_state_.velocities) v = Vec2{};
    initial_state_.t = 0.0;
    initial_state_.step_count = 0;
    reset();
  }

  int n_actuators() const { return int(system_.actuators.size()); }
  int n_occupied() const { return int(system_.voxels.size()); }
  int action_dim() const {
    return n_actuators() +
           (mode_ == ControlMode::kReactive ? n_occupied() : 0);
  }
  int observation_dim() const {
    int dim = 2 * int(system_.masses.size()) + 2 + task_.terrain_samples;
    if (mode_ == ControlMode::kReactive && task_.observe_prev_stiffness)
      dim += n_occupied();
    return dim;
  }

  ControlMode mode() const { return mode_; }
  const TaskSpec& task() const { return task_; }
  const RobotDesign& design() const { return design_; }
  const MassSpringSystem& system() const { return system_; }
  const SimState& state() const { return state_; }
  const SimParams& params() const { return params_; }
  int tick() const { return tick_; }
  bool done() const { return done_; }
  bool diverged() const { return diverged_; }
  double initial_area() const { return area0_; }

  std::vector<double> reset() {
    state_ = initial_state_;
    for (size_t k = 0; k < system_.voxels.size(); ++k)
      system_.voxels[k].factor = initial_factors_[k];
    refresh_effective_stiffness(system_, params_);
    prev_factors_ = initial_factors_;
    std::vector<double> neutral(size_t(n_actuators()), 1.0);
    apply_actuation(system_, neutral);
    tick_ = 0;
    done_ = false;
    diverged_ = false;
    area0_ = body_area(system_, state_);
    prev_com_x_ = center_of_mass(system_, state_).x;
    prev_area_ = area0_;
    return observation();
  }

  // One control tick: installs the commanded stiffness field (reactive
  // mode), then advances `control_decimation` physics steps under constant
  // actuation. Reward is the per-tick displacement or relative area change.
  StepResult step(std::span<const double> action) {
    if (done_) {
      throw std::logic_error("env stepped after episode end; call reset()");
    }
    if (int(action.size()) != action_dim()) {
      throw ShapeMismatch("env action: expected " +
                          std::to_string(action_dim()) + " values, got " +
                          std::to_string(action.size()));
    }
    std::vector<double> ratios(action.begin(),
                               action.begin() + n_actuators());
    for (double& r : ratios) r = clamp_actuation(r);
    if (mode_ == ControlMode::kReactive) {
      std::vector<double> factors(action.begin() + n_actuators(),
                                  action.end());
      set_reactive_stiffness(system_, factors, params_);
      for (size_t k = 0; k < factors.size(); ++k)
        prev_factors_[k] = system_.voxels[k].factor;
    }

    for (int k = 0; k < task_.control_decimation && !diverged_; ++k) {
      try {
        voxelsoft::step(system_, state_, ratios, params_, task_.terrain);
      } catch (const SimulationDiverged&) {
        diverged_ = true;
      }
    }

    StepResult res;
    res.reward = diverged_ ? 0.0 : tick_reward();
    ++tick_;
    done_ = diverged_ || tick_ >= task_.episode_ticks;
    res.done = done_;
    res.observation = observation();
    res.info["diverged"] = diverged_ ? 1.0 : 0.0;
    if (!diverged_) {
      Vec2 com = center_of_mass(system_, state_);
      res.info["com_x"] = com.x;
      res.info["com_y"] = com.y;
      res.info["area"] = body_area(system_, state_);
    }
    return res;
  }

  // Observation: corner positions in the CoM frame, CoM velocity, ground
  // height probes ahead of the CoM (relative to CoM height), and, in
  // reactive mode, the stiffness factors applied last tick.
  std::vector<double> observation() const {
    std::vector<double> obs;
    obs.reserve(size_t(observation_dim()));
    Vec2 com = center_of_mass(system_, state_);
    for (const Vec2& p : state_.positions) {
      obs.push_back(p.x - com.x);
      obs.push_back(p.y - com.y);
    }
    Vec2 comv{};
    double total = 0.0;
    for (size_t i = 0; i < system_.masses.size(); ++i) {
      comv += state_.velocities[i] * system_.masses[i].mass;
      total += system_.masses[i].mass;
    }
    comv = comv / total;
    obs.push_back(comv.x);
    obs.push_back(comv.y);
    double spacing = task_.probe_spacing_voxels * params_.voxel_size;
    for (int k = 0; k < task_.terrain_samples; ++k) {
      obs.push_back(task_.terrain.ground(com.x + k * spacing) - com.y);
    }
    if (mode_ == ControlMode::kReactive && task_.observe_prev_stiffness) {
      obs.insert(obs.end(), prev_factors_.begin(), prev_factors_.end());
    }
    return obs;
  }

  const std::vector<double>& current_factors() const { return prev_factors_; }

 private:
  double tick_reward() {
    if (is_locomotion_task(task_.id)) {
      double x = center_of_mass(system_, state_).x;
      double r = x - prev_com_x_;
      prev_com_x_ = x;
      return r;
    }
    double a = body_area(system_, state_);
    double r = (a - prev_area_) / area0_;
    prev_area_ = a;
    return task_.id == TaskId::kAreaMinimizer ? -r : r;
  }

  TaskSpec task_;
  RobotDesign design_;
  ControlMode mode_;
  uint64_t seed_;
  SimParams params_;
  MassSpringSystem system_;
  SimState state_;
  SimState initial_state_;
  std::vector<double> initial_factors_;
  std::vector<double> prev_factors_;
  int tick_ = 0;
  bool done_ = false;
  bool diverged_ = false;
  double area0_ = 0.0;
  double prev_com_x_ = 0.0;
  double prev_area_ = 0.0;
};

inline Env make_env(const TaskSpec& task, const RobotDesign& design,
                    ControlMode mode, uint64_t seed,
                    const SimParams& params = {}) {
  return Env(task, design, mode, seed, params);
}

}  // namespace voxelsoft
