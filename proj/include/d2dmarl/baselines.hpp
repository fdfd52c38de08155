#pragma once

// Comparison algorithms sharing the environment interface: random
// allocation, independent tabular Q-learning, independent deep Q-networks,
// independent actor-critic (single-agent critic scope), and a linear
// reward-inaction learning automaton. All of them act on per-agent
// observations only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "d2dmarl/env.hpp"
#include "d2dmarl/marl.hpp"
#include "d2dmarl/neural.hpp"
#include "d2dmarl/rng.hpp"

namespace d2dmarl {

namespace stream {
inline constexpr std::uint64_t kRandomAlloc = 0x726E6461ULL;
inline constexpr std::uint64_t kEpsGreedy = 0x65707367ULL;
inline constexpr std::uint64_t kSlaSample = 0x736C6173ULL;
inline constexpr std::uint64_t kDqnInit = 0x64716E30ULL;
inline constexpr std::uint64_t kDqnSample = 0x64716E73ULL;
}  // namespace stream

// ---------------------------------------------------------------------------
// Random allocation
// ---------------------------------------------------------------------------

template <class PerSlot>
ExecutionMetrics random_allocator(Env& env, std::int64_t slots, std::uint64_t seed,
                                  PerSlot&& per_slot) {
  const int n = env.config().cell.num_d2d;
  const int k = env.config().cell.num_rbs;
  ExecutionMetrics metrics;
  std::vector<int> joint(n);
  for (std::int64_t t = 0; t < slots; ++t) {
    const std::int64_t slot = env.slot();
    for (int i = 0; i < n; ++i)
      joint[i] = static_cast<int>(rng::mix(seed, stream::kRandomAlloc,
                                           static_cast<std::uint64_t>(slot),
                                           static_cast<std::uint64_t>(i)) %
                                  static_cast<std::uint64_t>(k));
    StepOutcome outcome = env.step(joint);
    accumulate(metrics, outcome);
    per_slot(slot, joint, outcome);
  }
  return metrics;
}

inline ExecutionMetrics random_allocator(Env& env, std::int64_t slots, std::uint64_t seed) {
  return random_allocator(env, slots, seed,
                          [](std::int64_t, const std::vector<int>&, const StepOutcome&) {});
}

// ---------------------------------------------------------------------------
// Independent tabular Q-learning
// ---------------------------------------------------------------------------

// Discretization: each of the three scalar observation components is binned
// uniformly over the normalized (clamped) range; the previous-RB one-hot is
// used as-is (K choices plus the all-zero initial state). The coarse grid is
// deliberate: tabular methods degrade as the state space grows, and the
// table makes that tradeoff visible.
struct QTable {
  int bins = 4;
  int num_rbs = 0;
  double lo = -3.0, hi = 3.0;  // normalized observation range
  std::vector<double> values;  // num_states x K, row-major

  int num_states() const { return bins * bins * bins * (num_rbs + 1); }

  int scalar_bin(double v) const {
    const double z = (v - lo) / (hi - lo);
    int b = static_cast<int>(std::floor(z * bins));
    return std::clamp(b, 0, bins - 1);
  }

  int state_index(std::span<const double> norm_obs) const {
    if (static_cast<int>(norm_obs.size()) != 3 + num_rbs)
      throw std::invalid_argument("QTable: observation length mismatch");
    int idx = 0;
    for (int c = 0; c < 3; ++c) idx = idx * bins + scalar_bin(norm_obs[c]);
    int k_prev = num_rbs;  // sentinel: no previous choice
    for (int k = 0; k < num_rbs; ++k)
      if (norm_obs[3 + k] > 0.5) {
        k_prev = k;
        break;
      }
    return idx * (num_rbs + 1) + k_prev;
  }

  double& q(int state, int action) { return values[static_cast<std::size_t>(state) * num_rbs + action]; }
  double q(int state, int action) const {
    return values[static_cast<std::size_t>(state) * num_rbs + action];
  }

  int greedy_action(int state) const {
    int best = 0;
    for (int a = 1; a < num_rbs; ++a)
      if (q(state, a) > q(state, best)) best = a;
    return best;
  }

  double max_q(int state) const { return q(state, greedy_action(state)); }
};

struct QLearningConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_end = 0.05;
  int bins = 4;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("QLearningConfig: alpha in (0,1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("QLearningConfig: gamma in [0,1)");
    if (bins < 1) throw std::invalid_argument("QLearningConfig: bins >= 1");
  }
};

struct QLearningResult {
  std::vector<QTable> tables;
  std::vector<TrainLogRow> log;
};

inline double annealed_epsilon(double eps_start, double eps_end, std::int64_t t,
                               std::int64_t total) {
  if (total <= 1) return eps_end;
  const double progress = static_cast<double>(t) / static_cast<double>(total - 1);
  return eps_start + std::min(1.0, std::max(0.0, progress)) * (eps_end - eps_start);
}

inline QLearningResult train_q_learning(Env& env, const QLearningConfig& cfg, std::uint64_t seed,
                                        std::int64_t total_slots) {
  cfg.validate();
  const int n = env.config().cell.num_d2d;
  const int k = env.config().cell.num_rbs;
  QLearningResult result;
  result.tables.assign(n, QTable{});
  for (auto& t : result.tables) {
    t.bins = cfg.bins;
    t.num_rbs = k;
    t.values.assign(static_cast<std::size_t>(t.num_states()) * k, 0.0);
  }
  std::vector<int> joint(n), state_idx(n);
  for (std::int64_t step = 0; step < total_slots; ++step) {
    const std::int64_t slot = env.slot();
    const double eps = annealed_epsilon(cfg.eps_start, cfg.eps_end, step, total_slots);
    const auto states = env.normalized_observations();
    for (int i = 0; i < n; ++i) {
      state_idx[i] = result.tables[i].state_index(states[i]);
      const std::uint64_t h = rng::mix(seed, stream::kEpsGreedy, static_cast<std::uint64_t>(slot),
                                       static_cast<std::uint64_t>(i));
      if (rng::u64_to_unit(h) < eps)
        joint[i] = static_cast<int>(rng::mix(h, 0x616374ULL) % static_cast<std::uint64_t>(k));
      else
        joint[i] = result.tables[i].greedy_action(state_idx[i]);
    }
    StepOutcome outcome = env.step(joint);
    TrainLogRow row;
    row.slot = slot;
    row.agent_rewards = outcome.rewards;
    for (double r : outcome.rewards) row.total_reward += r;
    for (bool o : outcome.cue_outages) row.cue_outage_count += o ? 1 : 0;
    for (bool o : outcome.d2d_outages) row.d2d_outage_count += o ? 1 : 0;
    row.sum_d2d_rate = sum_d2d_rate(outcome);
    row.critic_loss_mean = std::numeric_limits<double>::quiet_NaN();
    row.actor_objective_mean = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < n; ++i) {
      auto& table = result.tables[i];
      const int next_idx =
          table.state_index(normalized_observation(outcome.next_observations[i], env.config().norm));
      double& qv = table.q(state_idx[i], joint[i]);
      qv += cfg.alpha * (outcome.rewards[i] + cfg.gamma * table.max_q(next_idx) - qv);
    }
    result.log.push_back(std::move(row));
  }
  return result;
}

template <class PerSlot>
ExecutionMetrics execute_q_tables(Env& env, const std::vector<QTable>& tables, std::int64_t slots,
                                  PerSlot&& per_slot) {
  const int n = env.config().cell.num_d2d;
  if (static_cast<int>(tables.size()) != n)
    throw std::invalid_argument("execute_q_tables: table count != N");
  ExecutionMetrics metrics;
  std::vector<int> joint(n);
  for (std::int64_t t = 0; t < slots; ++t) {
    const auto states = env.normalized_observations();
    for (int i = 0; i < n; ++i) joint[i] = tables[i].greedy_action(tables[i].state_index(states[i]));
    StepOutcome outcome = env.step(joint);
    accumulate(metrics, outcome);
    per_slot(env.slot() - 1, joint, outcome);
  }
  return metrics;
}

inline ExecutionMetrics execute_q_tables(Env& env, const std::vector<QTable>& tables,
                                         std::int64_t slots) {
  return execute_q_tables(env, tables, slots,
                          [](std::int64_t, const std::vector<int>&, const StepOutcome&) {});
}

// ---------------------------------------------------------------------------
// Independent deep Q-networks
// ---------------------------------------------------------------------------

struct DqnConfig {
  double gamma = 0.95;
  double tau = 0.01;
  double lr = 1e-3;
  int batch_size = 64;
  int warmup_slots = 2000;
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::size_t buffer_capacity = 1000000;
  std::vector<int> hidden{128, 64};

  void validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("DqnConfig: gamma in [0,1)");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("DqnConfig: tau in [0,1]");
    if (batch_size < 1) throw std::invalid_argument("DqnConfig: batch_size >= 1");
    if (hidden.empty()) throw std::invalid_argument("DqnConfig: need hidden layers");
  }
};

struct DqnTransition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
};

struct DqnResult {
  std::vector<MLPNet> nets;  // target networks (deployed greedily)
  std::vector<MLPNet> online_nets;
  std::vector<TrainLogRow> log;
};

// One Bellman-residual optimizer step on a single agent's Q-network.
// Returns the pre-step mean squared TD error.
inline double dqn_update(MLPNet& net, const MLPNet& target, const std::vector<DqnTransition>& batch,
                         double gamma, Gradients& grads, AdamState& opt) {
  grads.zero();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  ForwardCache cache;
  double loss = 0.0;
  std::vector<double> dout(net.output_dim());
  for (const auto& tr : batch) {
    const auto next_q = forward(target, tr.next_state);
    const double y = tr.reward + gamma * next_q[argmax(next_q)];
    forward(net, tr.state, cache);
    const double diff = cache.output()[tr.action] - y;
    loss += diff * diff * inv_b;
    std::fill(dout.begin(), dout.end(), 0.0);
    dout[tr.action] = 2.0 * diff * inv_b;
    backward(net, cache, dout, grads);
  }
  if (!std::isfinite(loss)) throw TrainingFault("non-finite deep Q-network loss");
  adam_step(net, grads, opt);
  return loss;
}

inline DqnResult train_dqn(Env& env, const DqnConfig& cfg, std::uint64_t seed,
                           std::int64_t total_slots) {
  cfg.validate();
  const int n = env.config().cell.num_d2d;
  const int k = env.config().cell.num_rbs;
  MLPSpec spec;
  spec.layer_sizes.push_back(env.observation_dim());
  for (int h : cfg.hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(k);

  DqnResult result;
  std::vector<AdamState> opts;
  std::vector<Gradients> grads;
  std::vector<std::vector<DqnTransition>> buffers(n);  // FIFO rings
  std::vector<std::size_t> heads(n, 0);
  for (int i = 0; i < n; ++i) {
    result.online_nets.push_back(
        init_weights(spec, rng::mix(seed, stream::kDqnInit, static_cast<std::uint64_t>(i))));
    opts.push_back(AdamState::for_net(result.online_nets[i], cfg.lr));
    grads.push_back(Gradients::zeros_like(result.online_nets[i]));
  }
  result.nets = result.online_nets;

  std::vector<int> joint(n);
  std::vector<std::vector<double>> states;
  for (std::int64_t step = 0; step < total_slots; ++step) {
    const std::int64_t slot = env.slot();
    const double eps = slot < cfg.warmup_slots
                           ? 1.0
                           : annealed_epsilon(cfg.eps_start, cfg.eps_end, step, total_slots);
    states = env.normalized_observations();
    for (int i = 0; i < n; ++i) {
      const std::uint64_t h = rng::mix(seed, stream::kEpsGreedy, static_cast<std::uint64_t>(slot),
                                       static_cast<std::uint64_t>(i));
      if (rng::u64_to_unit(h) < eps)
        joint[i] = static_cast<int>(rng::mix(h, 0x616374ULL) % static_cast<std::uint64_t>(k));
      else
        joint[i] = argmax(forward(result.online_nets[i], states[i]));
    }
    StepOutcome outcome = env.step(joint);

    TrainLogRow row;
    row.slot = slot;
    row.agent_rewards = outcome.rewards;
    for (double r : outcome.rewards) row.total_reward += r;
    for (bool o : outcome.cue_outages) row.cue_outage_count += o ? 1 : 0;
    for (bool o : outcome.d2d_outages) row.d2d_outage_count += o ? 1 : 0;
    row.sum_d2d_rate = sum_d2d_rate(outcome);
    row.critic_loss_mean = std::numeric_limits<double>::quiet_NaN();
    row.actor_objective_mean = std::numeric_limits<double>::quiet_NaN();

    for (int i = 0; i < n; ++i) {
      DqnTransition tr;
      tr.state = states[i];
      tr.action = joint[i];
      tr.reward = outcome.rewards[i];
      tr.next_state = normalized_observation(outcome.next_observations[i], env.config().norm);
      if (buffers[i].size() < cfg.buffer_capacity) {
        buffers[i].push_back(std::move(tr));
      } else {
        buffers[i][heads[i]] = std::move(tr);
        heads[i] = (heads[i] + 1) % cfg.buffer_capacity;
      }
    }

    if (slot >= cfg.warmup_slots &&
        buffers[0].size() >= static_cast<std::size_t>(cfg.batch_size)) {
      double loss_sum = 0.0;
      std::vector<DqnTransition> batch(cfg.batch_size);
      for (int i = 0; i < n; ++i) {
        rng::SplitMix64 gen(rng::mix(seed, stream::kDqnSample, static_cast<std::uint64_t>(slot),
                                     static_cast<std::uint64_t>(i)));
        for (int b = 0; b < cfg.batch_size; ++b)
          batch[b] = buffers[i][static_cast<std::size_t>(gen.next_below(buffers[i].size()))];
        loss_sum += dqn_update(result.online_nets[i], result.nets[i], batch, cfg.gamma, grads[i],
                               opts[i]);
        soft_update(result.nets[i], result.online_nets[i], cfg.tau);
      }
      row.critic_loss_mean = loss_sum / n;
    }
    result.log.push_back(std::move(row));
  }
  return result;
}

// Greedy execution reuses the decentralized actor loop: Q-networks are used
// as argmax policies over their K outputs.
inline ExecutionMetrics execute_dqn(Env& env, const std::vector<MLPNet>& nets,
                                    std::int64_t slots) {
  return execute(env, nets, slots);
}

// ---------------------------------------------------------------------------
// Independent actor-critic: the multi-agent trainer with the critic scope
// narrowed to the agent itself (neighborhood scope, lambda = 0). Isolates
// the value of centralized training.
// ---------------------------------------------------------------------------

inline TrainResult train_independent_ac(Env& env, TrainerConfig cfg, std::uint64_t seed,
                                        std::int64_t total_slots) {
  cfg.mode = CriticMode::kNaac;
  cfg.lambda = 0;
  return train_marl(env, cfg, seed, total_slots);
}

// ---------------------------------------------------------------------------
// Linear reward-inaction learning automaton
// ---------------------------------------------------------------------------

struct AutomatonState {
  std::vector<double> probs;      // distribution over K RBs
  double running_max = 0.0;       // per-agent reward normalizer

  void validate() const {
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::logic_error("AutomatonState: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::logic_error("AutomatonState: probabilities must sum to 1");
  }
};

struct SlaConfig {
  double b = 0.1;  // step size

  void validate() const {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("SlaConfig: b in (0,1)");
  }
};

// p <- p + b * r_hat * (e_a - p); r_hat in [0,1] via the running max of
// positive rewards (non-positive rewards leave the automaton unchanged).
inline void sla_update(AutomatonState& st, int action, double reward, double b) {
  st.running_max = std::max(st.running_max, reward);
  const double r_hat = (reward > 0.0 && st.running_max > 0.0) ? reward / st.running_max : 0.0;
  for (std::size_t a = 0; a < st.probs.size(); ++a) {
    const double e = (static_cast<int>(a) == action) ? 1.0 : 0.0;
    st.probs[a] += b * r_hat * (e - st.probs[a]);
  }
}

inline int sample_from_probs(const std::vector<double>& probs, double u) {
  double cum = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cum += probs[a];
    if (u < cum) return static_cast<int>(a);
  }
  return static_cast<int>(probs.size()) - 1;  // guard against rounding
}

struct SlaResult {
  std::vector<AutomatonState> automata;
  std::vector<TrainLogRow> log;
};

inline SlaResult train_sla(Env& env, const SlaConfig& cfg, std::uint64_t seed,
                           std::int64_t total_slots) {
  cfg.validate();
  const int n = env.config().cell.num_d2d;
  const int k = env.config().cell.num_rbs;
  SlaResult result;
  result.automata.assign(n, AutomatonState{});
  for (auto& st : result.automata) st.probs.assign(k, 1.0 / k);

  std::vector<int> joint(n);
  for (std::int64_t step = 0; step < total_slots; ++step) {
    const std::int64_t slot = env.slot();
    for (int i = 0; i < n; ++i) {
      const double u = rng::u64_to_unit(rng::mix(seed, stream::kSlaSample,
                                                 static_cast<std::uint64_t>(slot),
                                                 static_cast<std::uint64_t>(i)));
      joint[i] = sample_from_probs(result.automata[i].probs, u);
    }
    StepOutcome outcome = env.step(joint);
    TrainLogRow row;
    row.slot = slot;
    row.agent_rewards = outcome.rewards;
    for (double r : outcome.rewards) row.total_reward += r;
    for (bool o : outcome.cue_outages) row.cue_outage_count += o ? 1 : 0;
    for (bool o : outcome.d2d_outages) row.d2d_outage_count += o ? 1 : 0;
    row.sum_d2d_rate = sum_d2d_rate(outcome);
    row.critic_loss_mean = std::numeric_limits<double>::quiet_NaN();
    row.actor_objective_mean = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < n; ++i) sla_update(result.automata[i], joint[i], outcome.rewards[i], cfg.b);
    result.log.push_back(std::move(row));
  }
  return result;
}

// Greedy execution: each automaton plays its most probable RB.
inline ExecutionMetrics execute_sla(Env& env, const std::vector<AutomatonState>& automata,
                                    std::int64_t slots) {
  const int n = env.config().cell.num_d2d;
  if (static_cast<int>(automata.size()) != n)
    throw std::invalid_argument("execute_sla: automaton count != N");
  ExecutionMetrics metrics;
  std::vector<int> joint(n);
  for (std::int64_t t = 0; t < slots; ++t) {
    for (int i = 0; i < n; ++i) joint[i] = argmax(automata[i].probs);
    StepOutcome outcome = env.step(joint);
    accumulate(metrics, outcome);
  }
  return metrics;
}

}  // namespace d2dmarl
