#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxelsoft/common.hpp"
#include "voxelsoft/design.hpp"

namespace voxelsoft {

// ---------------------------------------------------------------------------
// observation normalization

// Running mean/variance (Welford). Frozen normalizers stop accumulating,
// which is how evaluation-time statistics are pinned.
struct ObsNormalizer {
  std::vector<double> mean;
  std::vector<double> m2;
  double count = 0.0;
  bool frozen = false;

  void init(int dim) {
    mean.assign(size_t(dim), 0.0);
    m2.assign(size_t(dim), 0.0);
    count = 0.0;
  }

  void update(std::span<const double> x) {
    if (frozen) return;
    count += 1.0;
    for (size_t k = 0; k < x.size(); ++k) {
      double delta = x[k] - mean[k];
      mean[k] += delta / count;
      m2[k] += delta * (x[k] - mean[k]);
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    if (count < 2.0) return out;
    for (size_t k = 0; k < out.size(); ++k) {
      double var = m2[k] / count;
      double z = (out[k] - mean[k]) / std::sqrt(var + 1e-8);
      out[k] = std::min(10.0, std::max(-10.0, z));
    }
    return out;
  }

  bool operator==(const ObsNormalizer&) const = default;
};

// ---------------------------------------------------------------------------
// policy network
//
// Feed-forward tanh trunk with a Gaussian action head (state-independent
// log-std) and a scalar value head on the shared trunk. All parameters live
// in one flat vector so the optimizer and the checkpoint format stay simple.

struct PolicyOutput {
  std::vector<double> action;  // raw (pre-squash) action
  double log_prob = 0.0;
  double value = 0.0;
};

class MlpPolicy {
 public:
  MlpPolicy() = default;

  MlpPolicy(int obs_dim, int act_dim, std::vector<int> hidden)
      : obs_dim_(obs_dim), act_dim_(act_dim), hidden_(std::move(hidden)) {
    compute_layout();
    theta.assign(size_t(total_params_), 0.0);
    norm.init(obs_dim_);
  }

  // Gaussian fan-in init; the action head starts near zero so initial
  // behavior is centered, log-std starts at log(0.5).
  void init_weights(Rng& rng) {
    auto fill = [&](int off, int rows, int cols, double scale) {
      double s = scale / std::sqrt(double(cols));
      for (int k = 0; k < rows * cols; ++k)
        theta[size_t(off + k)] = rng.gaussian(0.0, s);
    };
    int last = hidden_.empty() ? obs_dim_ : hidden_.back();
    for (size_t l = 0; l < hidden_.size(); ++l) {
      int in = l == 0 ? obs_dim_ : hidden_[l - 1];
      fill(w_off_[l], hidden_[l], in, 1.0);
    }
    fill(mu_w_off_, act_dim_, last, 0.01);
    fill(v_w_off_, 1, last, 1.0);
    for (int k = 0; k < act_dim_; ++k)
      theta[size_t(log_std_off_ + k)] = std::log(0.5);
  }

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  const std::vector<int>& hidden() const { return hidden_; }
  int param_count() const { return total_params_; }

  double log_std(int k) const { return theta[size_t(log_std_off_ + k)]; }

  // Trunk activations kept for backprop: acts[0] is the input, acts[l+1]
  // the post-tanh output of layer l.
  struct Forward {
    std::vector<std::vector<double>> acts;
    std::vector<double> mu;
    double value = 0.0;
  };

  Forward forward(std::span<const double> x) const {
    if (int(x.size()) != obs_dim_) {
      throw DimensionMismatch("policy input: expected " +
                              std::to_string(obs_dim_) + " values, got " +
                              std::to_string(x.size()));
    }
    Forward f;
    f.acts.reserve(hidden_.size() + 1);
    f.acts.emplace_back(x.begin(), x.end());
    for (size_t l = 0; l < hidden_.size(); ++l) {
      const std::vector<double>& in = f.acts.back();
      std::vector<double> out(size_t(hidden_[l]));
      for (int r = 0; r < hidden_[l]; ++r) {
        double z = theta[size_t(b_off_[l] + r)];
        const double* w = &theta[size_t(w_off_[l] + r * int(in.size()))];
        for (size_t c = 0; c < in.size(); ++c) z += w[c] * in[c];
        out[size_t(r)] = std::tanh(z);
      }
      f.acts.push_back(std::move(out));
    }
    const std::vector<double>& h = f.acts.back();
    f.mu.assign(size_t(act_dim_), 0.0);
    for (int r = 0; r < act_dim_; ++r) {
      double z = theta[size_t(mu_b_off_ + r)];
      const double* w = &theta[size_t(mu_w_off_ + r * int(h.size()))];
      for (size_t c = 0; c < h.size(); ++c) z += w[c] * h[c];
      f.mu[size_t(r)] = z;
    }
    f.value = theta[size_t(v_b_off_)];
    for (size_t c = 0; c < h.size(); ++c)
      f.value += theta[size_t(v_w_off_) + c] * h[c];
    return f;
  }

  // Diagonal-Gaussian log density of a raw action.
  double log_prob(std::span<const double> mu,
                  std::span<const double> action) const {
    double lp = 0.0;
    for (int k = 0; k < act_dim_; ++k) {
      double ls = log_std(k);
      double sigma = std::exp(ls);
      double z = (action[size_t(k)] - mu[size_t(k)]) / sigma;
      lp += -0.5 * z * z - ls - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return lp;
  }

  double entropy() const {
    double h = 0.0;
    for (int k = 0; k < act_dim_; ++k)
      h += log_std(k) + 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    return h;
  }

  // Normalizes the raw observation and produces an action. Deterministic
  // mode returns the Gaussian mean; stochastic mode samples with the stored
  // per-dimension std.
  PolicyOutput act(std::span<const double> raw_obs, bool stochastic,
                   Rng* rng) const {
    std::vector<double> x = norm.apply(raw_obs);
    Forward f = forward(x);
    PolicyOutput out;
    out.value = f.value;
    out.action = f.mu;
    if (stochastic) {
      for (int k = 0; k < act_dim_; ++k)
        out.action[size_t(k)] += std::exp(log_std(k)) * rng->gaussian();
    }
    out.log_prob = log_prob(f.mu, out.action);
    return out;
  }

  // Backpropagates head gradients (dmu, dvalue) through the trunk into a
  // flat gradient accumulator aligned with theta.
  void backward(const Forward& f, std::span<const double> dmu, double dvalue,
                std::vector<double>& grad) const {
    const std::vector<double>& h = f.acts.back();
    std::vector<double> dh(h.size(), 0.0);
    for (int r = 0; r < act_dim_; ++r) {
      double g = dmu[size_t(r)];
      grad[size_t(mu_b_off_ + r)] += g;
      for (size_t c = 0; c < h.size(); ++c) {
        grad[size_t(mu_w_off_ + r * int(h.size())) + c] += g * h[c];
        dh[c] += g * theta[size_t(mu_w_off_ + r * int(h.size())) + c];
      }
    }
    grad[size_t(v_b_off_)] += dvalue;
    for (size_t c = 0; c < h.size(); ++c) {
      grad[size_t(v_w_off_) + c] += dvalue * h[c];
      dh[c] += dvalue * theta[size_t(v_w_off_) + c];
    }
    for (int l = int(hidden_.size()) - 1; l >= 0; --l) {
      const std::vector<double>& out = f.acts[size_t(l + 1)];
      const std::vector<double>& in = f.acts[size_t(l)];
      std::vector<double> din(in.size(), 0.0);
      for (int r = 0; r < hidden_[size_t(l)]; ++r) {
        double dz = dh[size_t(r)] * (1.0 - out[size_t(r)] * out[size_t(r)]);
        grad[size_t(b_off_[size_t(l)] + r)] += dz;
        const int row = w_off_[size_t(l)] + r * int(in.size());
        for (size_t c = 0; c < in.size(); ++c) {
          grad[size_t(row) + c] += dz * in[c];
          din[c] += dz * theta[size_t(row) + c];
        }
      }
      dh = std::move(din);
    }
  }

  int log_std_offset() const { return log_std_off_; }
  int mu_weight_offset() const { return mu_w_off_; }
  int mu_param_count() const { return act_dim_ * trunk_out_() + act_dim_; }

  std::vector<double> theta;
  ObsNormalizer norm;

  bool operator==(const MlpPolicy& o) const {
    return obs_dim_ == o.obs_dim_ && act_dim_ == o.act_dim_ &&
           hidden_ == o.hidden_ && theta == o.theta && norm == o.norm;
  }

 private:
  int trunk_out_() const { return hidden_.empty() ? obs_dim_ : hidden_.back(); }

  void compute_layout() {
    int off = 0;
    w_off_.clear();
    b_off_.clear();
    for (size_t l = 0; l < hidden_.size(); ++l) {
      int in = l == 0 ? obs_dim_ : hidden_[l - 1];
      w_off_.push_back(off);
      off += hidden_[l] * in;
      b_off_.push_back(off);
      off += hidden_[l];
    }
    int last = trunk_out_();
    mu_w_off_ = off;
    off += act_dim_ * last;
    mu_b_off_ = off;
    off += act_dim_;
    v_w_off_ = off;
    off += last;
    v_b_off_ = off;
    off += 1;
    log_std_off_ = off;
    off += act_dim_;
    total_params_ = off;
  }

  int obs_dim_ = 0;
  int act_dim_ = 0;
  std::vector<int> hidden_;
  std::vector<int> w_off_, b_off_;
  int mu_w_off_ = 0, mu_b_off_ = 0, v_w_off_ = 0, v_b_off_ = 0;
  int log_std_off_ = 0;
  int total_params_ = 0;
};

// ---------------------------------------------------------------------------
// action mapping

struct MappedAction {
  std::vector<double> actuation;  // target length ratios
  std::vector<double> stiffness;  // per-voxel factors; empty in motor mode
};

// tanh-squashes each raw component, then maps affinely onto the physical
// interval: actuation onto [0.6, 1.6], stiffness onto [0.5, 2.0].
inline MappedAction map_action(std::span<const double> raw, ControlMode mode,
                               int n_actuators, int n_occupied) {
  int expected = n_actuators +
                 (mode == ControlMode::kReactive ? n_occupied : 0);
  if (int(raw.size()) != expected) {
    throw DimensionMismatch("action: expected " + std::to_string(expected) +
                            " values, got " + std::to_string(raw.size()));
  }
  MappedAction out;
  out.actuation.resize(size_t(n_actuators));
  for (int k = 0; k < n_actuators; ++k) {
    out.actuation[size_t(k)] = 1.1 + 0.5 * std::tanh(raw[size_t(k)]);
  }
  if (mode == ControlMode::kReactive) {
    out.stiffness.resize(size_t(n_occupied));
    for (int k = 0; k < n_occupied; ++k) {
      out.stiffness[size_t(k)] =
          1.25 + 0.75 * std::tanh(raw[size_t(n_actuators + k)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// checkpoint format (JSON, versioned)

inline nlohmann::json policy_to_json(const MlpPolicy& p, ControlMode mode) {
  nlohmann::json j;
  j["format"] = 1;
  j["mode"] = control_mode_name(mode);
  j["obs_dim"] = p.obs_dim();
  j["act_dim"] = p.act_dim();
  j["hidden"] = p.hidden();
  j["theta"] = p.theta;
  j["norm"] = {{"count", p.norm.count},
               {"mean", p.norm.mean},
               {"m2", p.norm.m2},
               {"frozen", p.norm.frozen}};
  return j;
}

struct PolicyCheckpoint {
  MlpPolicy policy;
  ControlMode mode = ControlMode::kInvariant;
};

inline PolicyCheckpoint policy_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<int>() != 1) {
      throw ParseError("checkpoint: unsupported format version");
    }
    PolicyCheckpoint ck;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "reactive") {
      ck.mode = ControlMode::kReactive;
    } else if (mode == "motor") {
      ck.mode = ControlMode::kInvariant;
    } else {
      throw ParseError("checkpoint: unknown mode `" + mode + "`");
    }
    MlpPolicy p(j.at("obs_dim").get<int>(), j.at("act_dim").get<int>(),
                j.at("hidden").get<std::vector<int>>());
    auto theta = j.at("theta").get<std::vector<double>>();
    if (int(theta.size()) != p.param_count()) {
      throw ParseError("checkpoint: theta size mismatch");
    }
    p.theta = std::move(theta);
    const auto& n = j.at("norm");
    p.norm.count = n.at("count").get<double>();
    p.norm.mean = n.at("mean").get<std::vector<double>>();
    p.norm.m2 = n.at("m2").get<std::vector<double>>();
    p.norm.frozen = n.at("frozen").get<bool>();
    if (int(p.norm.mean.size()) != p.obs_dim() ||
        int(p.norm.m2.size()) != p.obs_dim()) {
      throw ParseError("checkpoint: normalizer size mismatch");
    }
    ck.policy = std::move(p);
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint document: ") + e.what());
  }
}

}  // namespace voxelsoft
