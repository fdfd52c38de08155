#pragma once

// Centralized action-value network with late action fusion: the state block
// feeds the first hidden layer alone; the action block is concatenated with
// that layer's output before the remaining hidden layers. Output is a
// scalar Q value.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmarl/neural.hpp"

namespace d2dmarl {

struct FusionCriticSpec {
  int state_dim = 0;
  int action_dim = 0;
  std::vector<int> hidden;  // {V1, V2, ...}; V1 is the pre-fusion layer width

  void validate() const {
    if (state_dim < 1 || action_dim < 1)
      throw std::invalid_argument("FusionCriticSpec: state/action dims must be >= 1");
    if (hidden.empty()) throw std::invalid_argument("FusionCriticSpec: need >= 1 hidden layer");
    for (int h : hidden)
      if (h < 1) throw std::invalid_argument("FusionCriticSpec: hidden sizes must be >= 1");
  }
};

struct FusionCritic {
  FusionCriticSpec fspec;
  MLPNet trunk;  // state_dim -> V1 (affine; rectifier applied at fusion)
  MLPNet head;   // (V1 + action_dim) -> V2 -> ... -> 1

  std::size_t num_params() const { return trunk.num_params() + head.num_params(); }
};

inline FusionCritic init_fusion_critic(const FusionCriticSpec& fspec, std::uint64_t seed) {
  fspec.validate();
  FusionCritic c;
  c.fspec = fspec;
  MLPSpec trunk_spec;
  trunk_spec.layer_sizes = {fspec.state_dim, fspec.hidden[0]};
  MLPSpec head_spec;
  head_spec.layer_sizes.push_back(fspec.hidden[0] + fspec.action_dim);
  for (std::size_t l = 1; l < fspec.hidden.size(); ++l)
    head_spec.layer_sizes.push_back(fspec.hidden[l]);
  head_spec.layer_sizes.push_back(1);
  c.trunk = init_weights(trunk_spec, rng::mix(seed, 0x74726B00ULL));
  c.head = init_weights(head_spec, rng::mix(seed, 0x68656164ULL));
  return c;
}

struct FusionCriticCache {
  ForwardCache trunk_cache;
  ForwardCache head_cache;
  std::vector<double> trunk_relu;  // rectified trunk output (fusion input)
};

inline double critic_forward(const FusionCritic& c, std::span<const double> state,
                             std::span<const double> action, FusionCriticCache& cache) {
  if (static_cast<int>(state.size()) != c.fspec.state_dim)
    throw std::invalid_argument("critic_forward: state length mismatch");
  if (static_cast<int>(action.size()) != c.fspec.action_dim)
    throw std::invalid_argument("critic_forward: action length mismatch");
  forward(c.trunk, state, cache.trunk_cache);
  const auto& z1 = cache.trunk_cache.acts.back();
  cache.trunk_relu.resize(z1.size());
  for (std::size_t i = 0; i < z1.size(); ++i) cache.trunk_relu[i] = z1[i] > 0.0 ? z1[i] : 0.0;
  std::vector<double> fused;
  fused.reserve(cache.trunk_relu.size() + action.size());
  fused.insert(fused.end(), cache.trunk_relu.begin(), cache.trunk_relu.end());
  fused.insert(fused.end(), action.begin(), action.end());
  forward(c.head, fused, cache.head_cache);
  return cache.head_cache.acts.back()[0];
}

inline double critic_forward(const FusionCritic& c, std::span<const double> state,
                             std::span<const double> action) {
  FusionCriticCache cache;
  return critic_forward(c, state, action, cache);
}

struct FusionCriticGradients {
  Gradients trunk;
  Gradients head;

  static FusionCriticGradients zeros_like(const FusionCritic& c) {
    return {Gradients::zeros_like(c.trunk), Gradients::zeros_like(c.head)};
  }
  void zero() {
    trunk.zero();
    head.zero();
  }
  void scale(double s) {
    trunk.scale(s);
    head.scale(s);
  }
};

struct FusionCriticInputGrads {
  std::vector<double> d_state;
  std::vector<double> d_action;
};

// Accumulates parameter gradients of (d_q * Q) and returns input gradients.
inline FusionCriticInputGrads critic_backward(const FusionCritic& c, const FusionCriticCache& cache,
                                              double d_q, FusionCriticGradients& grads) {
  const double dq[1] = {d_q};
  std::vector<double> d_fused = backward(c.head, cache.head_cache, dq, grads.head);
  const int v1 = c.fspec.hidden[0];
  FusionCriticInputGrads out;
  out.d_action.assign(d_fused.begin() + v1, d_fused.end());
  std::vector<double> d_z1(d_fused.begin(), d_fused.begin() + v1);
  const auto& z1 = cache.trunk_cache.acts.back();
  for (int i = 0; i < v1; ++i)
    if (!(z1[i] > 0.0)) d_z1[i] = 0.0;
  out.d_state = backward(c.trunk, cache.trunk_cache, d_z1, grads.trunk);
  return out;
}

struct FusionCriticAdam {
  AdamState trunk;
  AdamState head;

  static FusionCriticAdam for_critic(const FusionCritic& c, double lr) {
    return {AdamState::for_net(c.trunk, lr), AdamState::for_net(c.head, lr)};
  }
};

inline void adam_step(FusionCritic& c, const FusionCriticGradients& grads, FusionCriticAdam& opt) {
  adam_step(c.trunk, grads.trunk, opt.trunk);
  adam_step(c.head, grads.head, opt.head);
}

inline void soft_update(FusionCritic& target, const FusionCritic& online, double tau) {
  soft_update(target.trunk, online.trunk, tau);
  soft_update(target.head, online.head, tau);
}

inline void save_critic(const FusionCritic& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_critic: cannot open " + path);
  save_net(c.trunk, os);
  save_net(c.head, os);
}

inline FusionCritic load_critic(const std::string& path, const FusionCriticSpec& fspec) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_critic: cannot open " + path);
  FusionCritic c;
  c.fspec = fspec;
  c.trunk = load_net(is);
  c.head = load_net(is);
  if (c.trunk.input_dim() != fspec.state_dim ||
      c.head.input_dim() != fspec.hidden[0] + fspec.action_dim || c.head.output_dim() != 1)
    throw std::runtime_error("load_critic: weight shapes do not match spec");
  return c;
}

}  // namespace d2dmarl
