#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "voxelsoft/common.hpp"
#include "voxelsoft/env.hpp"
#include "voxelsoft/policy.hpp"

namespace voxelsoft {

// ---------------------------------------------------------------------------
// configuration

struct TrainConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_ratio = 0.2;
  double learning_rate = 3e-4;
  int epochs = 4;
  int minibatch = 64;
  int rollout_ticks = 2048;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  std::vector<int> hidden{64, 64};
  int eval_episodes = 1;
};

// ---------------------------------------------------------------------------
// trajectories

struct Trajectory {
  std::vector<std::vector<double>> observations;  // as seen by the policy
  std::vector<std::vector<double>> raw_actions;
  std::vector<std::vector<double>> mapped_actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<uint8_t> done;  // episode ended at this tick (incl. divergence)
  double bootstrap_value = 0.0;

  size_t size() const { return rewards.size(); }
};

// Collects n_ticks of experience, resetting the environment whenever an
// episode ends. Updates the policy's observation statistics unless frozen.
inline Trajectory collect_rollout(Env& env, MlpPolicy& policy, int n_ticks,
                                  Rng& rng, bool stochastic = true) {
  Trajectory traj;
  traj.observations.reserve(size_t(n_ticks));
  for (int t = 0; t < n_ticks; ++t) {
    if (env.done()) env.reset();
    std::vector<double> raw_obs = env.observation();
    policy.norm.update(raw_obs);
    std::vector<double> x = policy.norm.apply(raw_obs);
    MlpPolicy::Forward f = policy.forward(x);
    std::vector<double> a = f.mu;
    if (stochastic) {
      for (int k = 0; k < policy.act_dim(); ++k)
        a[size_t(k)] += std::exp(policy.log_std(k)) * rng.gaussian();
    }
    double logp = policy.log_prob(f.mu, a);
    MappedAction mapped =
        map_action(a, env.mode(), env.n_actuators(), env.n_occupied());
    std::vector<double> cmd = mapped.actuation;
    cmd.insert(cmd.end(), mapped.stiffness.begin(), mapped.stiffness.end());
    StepResult sr = env.step(cmd);

    traj.observations.push_back(std::move(x));
    traj.raw_actions.push_back(std::move(a));
    traj.mapped_actions.push_back(std::move(cmd));
    traj.log_probs.push_back(logp);
    traj.rewards.push_back(sr.reward);
    traj.values.push_back(f.value);
    traj.done.push_back(sr.done ? 1 : 0);
  }
  // bootstrap for the truncated tail; a finished (or diverged) episode
  // needs none and its state may not be evaluable
  if (n_ticks > 0 && !env.done()) {
    std::vector<double> x = policy.norm.apply(env.observation());
    traj.bootstrap_value = policy.forward(x).value;
  }
  return traj;
}

// ---------------------------------------------------------------------------
// generalized advantage estimation
//
// advantage_t = sum_k (gamma*lambda)^k * delta_{t+k}, cut at episode ends,
// with delta_t = r_t + gamma*V_{t+1}*(1-done_t) - V_t. Returns are
// advantages + values.

struct AdvantageResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

inline AdvantageResult gae_advantages(const Trajectory& traj, double gamma,
                                      double lambda) {
  size_t n = traj.size();
  AdvantageResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double acc = 0.0;
  for (size_t t = n; t-- > 0;) {
    // explicit masking: a terminal tick must not read the next value at
    // all (it may be a reset boundary or an unevaluable diverged state)
    double next_value =
        traj.done[t] ? 0.0
                     : (t + 1 < n ? traj.values[t + 1]
                                  : traj.bootstrap_value);
    double delta =
        traj.rewards[t] + gamma * next_value - traj.values[t];
    acc = delta + (traj.done[t] ? 0.0 : gamma * lambda * acc);
    out.advantages[t] = acc;
    out.returns[t] = acc + traj.values[t];
  }
  return out;
}

// ---------------------------------------------------------------------------
// flattened update batch

struct UpdateBatch {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> raw_actions;
  std::vector<double> log_probs_old;
  std::vector<double> advantages;
  std::vector<double> returns;

  size_t size() const { return advantages.size(); }
};

inline UpdateBatch build_batch(const std::vector<Trajectory>& trajs,
                               double gamma, double lambda) {
  UpdateBatch b;
  for (const Trajectory& t : trajs) {
    AdvantageResult adv = gae_advantages(t, gamma, lambda);
    b.observations.insert(b.observations.end(), t.observations.begin(),
                          t.observations.end());
    b.raw_actions.insert(b.raw_actions.end(), t.raw_actions.begin(),
                         t.raw_actions.end());
    b.log_probs_old.insert(b.log_probs_old.end(), t.log_probs.begin(),
                           t.log_probs.end());
    b.advantages.insert(b.advantages.end(), adv.advantages.begin(),
                        adv.advantages.end());
    b.returns.insert(b.returns.end(), adv.returns.begin(), adv.returns.end());
  }
  return b;
}

// ---------------------------------------------------------------------------
// loss
//
// L = -mean(min(rho*A, clip(rho)*A)) + value_coef*mean((V-R)^2)
//     - entropy_coef*entropy, minimized by Adam. Advantages are used as
//     given; ppo_update normalizes them beforehand.

struct LossStats {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

inline LossStats ppo_loss(const MlpPolicy& policy, const UpdateBatch& batch,
                          std::span<const size_t> indices,
                          const TrainConfig& cfg,
                          std::vector<double>* grad = nullptr) {
  LossStats stats;
  if (grad) grad->assign(policy.theta.size(), 0.0);
  const double inv_n = 1.0 / double(indices.size());
  const double lo = 1.0 - cfg.clip_ratio;
  const double hi = 1.0 + cfg.clip_ratio;

  for (size_t idx : indices) {
    MlpPolicy::Forward f = policy.forward(batch.observations[idx]);
    const std::vector<double>& a = batch.raw_actions[idx];
    double logp = policy.log_prob(f.mu, a);
    double adv = batch.advantages[idx];
    double rho = std::exp(logp - batch.log_probs_old[idx]);
    double clipped = std::min(hi, std::max(lo, rho));
    double t1 = rho * adv;
    double t2 = clipped * adv;
    bool take_unclipped = t1 <= t2;
    stats.policy += -std::min(t1, t2) * inv_n;

    double verr = f.value - batch.returns[idx];
    stats.value += cfg.value_coef * verr * verr * inv_n;

    if (grad) {
      // Only the active branch carries gradient; when the clipped branch
      // wins, rho sits outside [lo, hi] where the clip is flat.
      double dsurr_drho = take_unclipped ? adv : 0.0;
      double dlogp = -dsurr_drho * rho * inv_n;

      std::vector<double> dmu(size_t(policy.act_dim()), 0.0);
      for (int k = 0; k < policy.act_dim(); ++k) {
        double sigma = std::exp(policy.log_std(k));
        double z = (a[size_t(k)] - f.mu[size_t(k)]) / sigma;
        dmu[size_t(k)] = dlogp * z / sigma;
        // d logp / d log_std = z^2 - 1; entropy contributes -entropy_coef
        (*grad)[size_t(policy.log_std_offset() + k)] +=
            dlogp * (z * z - 1.0) - cfg.entropy_coef * inv_n;
      }
      double dvalue = cfg.value_coef * 2.0 * verr * inv_n;
      policy.backward(f, dmu, dvalue, *grad);
    }
  }
  stats.entropy = policy.entropy();
  stats.total = stats.policy + stats.value - cfg.entropy_coef * stats.entropy;
  return stats;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(size_t n = 0) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& theta, const std::vector<double>& grad,
            double lr) {
    if (m.size() != theta.size()) {
      m.assign(theta.size(), 0.0);
      v.assign(theta.size(), 0.0);
      t = 0;
    }
    ++t;
    double c1 = 1.0 - std::pow(beta1, double(t));
    double c2 = 1.0 - std::pow(beta2, double(t));
    for (size_t k = 0; k < theta.size(); ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
      theta[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
    }
  }
};

// ---------------------------------------------------------------------------
// update

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double adv_mean = 0.0;  // post-normalization
  double adv_std = 0.0;   // post-normalization
  int minibatches = 0;
  bool aborted = false;  // non-finite gradient; parameters restored
};

// Runs the configured epochs of minibatch Adam ascent on the clipped
// surrogate. Advantages are normalized over the whole batch first. A
// non-finite gradient aborts the update and restores the incoming
// parameters.
inline PpoStats ppo_update(MlpPolicy& policy, UpdateBatch& batch,
                           const TrainConfig& cfg, AdamState& adam,
                           Rng& rng) {
  if (batch.size() == 0) throw ConfigError("ppo_update: empty batch");
  PpoStats stats;
  std::vector<double> theta_in = policy.theta;

  // batch-level advantage normalization
  double mean = std::accumulate(batch.advantages.begin(),
                                batch.advantages.end(), 0.0) /
                double(batch.size());
  double var = 0.0;
  for (double a : batch.advantages) var += (a - mean) * (a - mean);
  var /= double(batch.size());
  double sd = std::sqrt(var);
  for (double& a : batch.advantages) a = (a - mean) / (sd + 1e-8);
  {
    double m2 = std::accumulate(batch.advantages.begin(),
                                batch.advantages.end(), 0.0) /
                double(batch.size());
    double v2 = 0.0;
    for (double a : batch.advantages) v2 += (a - m2) * (a - m2);
    stats.adv_mean = m2;
    stats.adv_std = std::sqrt(v2 / double(batch.size()));
  }

  std::vector<size_t> order(batch.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<double> grad;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size();
         start += size_t(cfg.minibatch)) {
      size_t end = std::min(order.size(), start + size_t(cfg.minibatch));
      std::span<const size_t> chunk(order.data() + start, end - start);
      LossStats ls = ppo_loss(policy, batch, chunk, cfg, &grad);
      for (double g : grad) {
        if (!std::isfinite(g)) {
          policy.theta = std::move(theta_in);
          stats.aborted = true;
          return stats;
        }
      }
      adam.step(policy.theta, grad, cfg.learning_rate);
      stats.policy_loss += ls.policy;
      stats.value_loss += ls.value;
      stats.entropy += ls.entropy;
      ++stats.minibatches;
    }
  }
  if (stats.minibatches > 0) {
    stats.policy_loss /= stats.minibatches;
    stats.value_loss /= stats.minibatches;
    stats.entropy /= stats.minibatches;
  }
  return stats;
}

}  // namespace voxelsoft
