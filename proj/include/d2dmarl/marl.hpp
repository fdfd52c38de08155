#pragma once

// Multi-agent actor-critic spectrum allocation with centralized training and
// decentralized execution. Two critic scopes share one code path:
//   - full scope: every agent's critic sees all agents' states and actions;
//   - neighborhood scope: each critic sees only the lambda nearest D2D pairs
//     (transmitter-to-transmitter distance) plus the agent itself.
// Critic inputs are always assembled in ascending agent-index order, so the
// neighborhood variant with lambda = N-1 is bitwise identical to full scope.
//
// All randomness is drawn from counter-based streams keyed by
// (seed, purpose, slot, agent), never from shared mutable state, so weight
// trajectories are reproducible and independent of critic scope.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmarl/critic.hpp"
#include "d2dmarl/env.hpp"
#include "d2dmarl/format.hpp"
#include "d2dmarl/neural.hpp"
#include "d2dmarl/replay.hpp"
#include "d2dmarl/rng.hpp"

namespace d2dmarl {

enum class CriticMode { kMaac, kNaac };

inline std::string to_string(CriticMode m) { return m == CriticMode::kMaac ? "maac" : "naac"; }

struct TrainerConfig {
  CriticMode mode = CriticMode::kMaac;
  int lambda = 0;  // neighbor count (neighborhood scope only)
  double gamma = 0.95;
  double tau = 0.01;
  int batch_size = 64;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int warmup_slots = 2000;          // random allocation, no updates
  double temp_start = 1.0;          // exploration temperature, annealed linearly
  double temp_end = 0.1;
  double relax_temperature = 0.5;   // softmax relaxation in the actor update
  std::size_t buffer_capacity = 1000000;
  std::vector<int> actor_hidden{512, 128};
  std::vector<int> critic_hidden{1024, 512, 256};
  std::string fault_dump_path;      // non-empty: dump offending batch on fault

  void validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("TrainerConfig: gamma in [0,1)");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("TrainerConfig: tau in [0,1]");
    if (batch_size < 1) throw std::invalid_argument("TrainerConfig: batch_size >= 1");
    if (lambda < 0) throw std::invalid_argument("TrainerConfig: lambda >= 0");
    if (warmup_slots < 0) throw std::invalid_argument("TrainerConfig: warmup_slots >= 0");
    if (!(temp_start > 0.0) || !(temp_end > 0.0) || !(relax_temperature > 0.0))
      throw std::invalid_argument("TrainerConfig: temperatures must be positive");
    if (buffer_capacity < static_cast<std::size_t>(batch_size))
      throw std::invalid_argument("TrainerConfig: buffer capacity < batch size");
    if (actor_hidden.empty() || critic_hidden.empty())
      throw std::invalid_argument("TrainerConfig: need at least one hidden layer");
  }
};

// Fixed purpose tags for counter-based RNG streams.
namespace stream {
inline constexpr std::uint64_t kWarmupAction = 0x7761726DULL;
inline constexpr std::uint64_t kExplore = 0x6578706CULL;
inline constexpr std::uint64_t kSample = 0x73616D70ULL;
inline constexpr std::uint64_t kActorInit = 0x61637430ULL;
inline constexpr std::uint64_t kCriticInit = 0x63727430ULL;
inline constexpr std::uint64_t kProp1 = 0x70726F70ULL;
}  // namespace stream

struct TrainingFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Neighbor selection
// ---------------------------------------------------------------------------

struct NeighborIndex {
  int lambda = 0;
  // self_first[i] = {i, then lambda nearest pairs by tx-to-tx distance,
  // ties broken by lower index}
  std::vector<std::vector<int>> self_first;
  // ascending[i] = same members sorted by agent index (critic input order)
  std::vector<std::vector<int>> ascending;
};

inline NeighborIndex build_neighbor_index(const CellTopology& topo, int lambda) {
  const int n = topo.num_d2d();
  if (lambda < 0 || lambda > n - 1)
    throw std::invalid_argument("build_neighbor_index: lambda must be in [0, N-1]");
  NeighborIndex idx;
  idx.lambda = lambda;
  idx.self_first.resize(n);
  idx.ascending.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> others;
    others.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i)
        others.emplace_back(distance(topo.d2d_tx_positions[i], topo.d2d_tx_positions[j]), j);
    std::sort(others.begin(), others.end());  // (distance, index) — index breaks ties
    auto& list = idx.self_first[i];
    list.push_back(i);
    for (int r = 0; r < lambda; ++r) list.push_back(others[r].second);
    idx.ascending[i] = list;
    std::sort(idx.ascending[i].begin(), idx.ascending[i].end());
  }
  return idx;
}

// ---------------------------------------------------------------------------
// Action selection
// ---------------------------------------------------------------------------

struct ExplorationParams {
  bool explore = false;
  double temperature = 1.0;
};

struct ActionSelection {
  int rb = 0;
  std::vector<double> one_hot;
  std::vector<double> logits;
};

// Training: sample from softmax(logits / T) via the Gumbel trick
// (argmax(logits + T * gumbel)). Execution: deterministic argmax with
// first-max tie-break.
inline ActionSelection select_action(const MLPNet& actor, std::span<const double> obs,
                                     const ExplorationParams& ex, rng::SplitMix64& gen) {
  ActionSelection sel;
  sel.logits = forward(actor, obs);
  if (ex.explore) {
    if (!(ex.temperature > 0.0))
      throw std::invalid_argument("select_action: temperature must be positive");
    std::vector<double> perturbed(sel.logits);
    for (double& v : perturbed) v += ex.temperature * rng::gumbel(gen.next_open_unit());
    sel.rb = argmax(perturbed);
  } else {
    sel.rb = argmax(sel.logits);
  }
  sel.one_hot.assign(sel.logits.size(), 0.0);
  sel.one_hot[sel.rb] = 1.0;
  return sel;
}

inline ActionSelection select_action(const MLPNet& actor, std::span<const double> obs) {
  rng::SplitMix64 unused(0);
  return select_action(actor, obs, ExplorationParams{}, unused);
}

// ---------------------------------------------------------------------------
// Toy policy-gradient alignment probe: N binary agents, parameter-free
// Bernoulli(0.5) policies, reward 1 only on all-ones consensus. Returns the
// fraction of single-sample score-function gradient estimates whose inner
// product with the consensus ascent direction is positive; the exact value
// is (0.5)^N, halving with every added agent.
// ---------------------------------------------------------------------------

inline double prop1_estimate(int n_agents, std::int64_t samples, std::uint64_t seed) {
  if (n_agents < 1 || samples < 1)
    throw std::invalid_argument("prop1_estimate: need n_agents >= 1 and samples >= 1");
  std::int64_t positive = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double inner = 0.0;
    double reward = 1.0;
    std::vector<double> score(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      const double u = rng::u64_to_unit(
          rng::mix(seed, stream::kProp1, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i)));
      const double a = u < 0.5 ? 0.0 : 1.0;
      if (a != 1.0) reward = 0.0;
      score[i] = (a - 0.5) / 0.25;  // d/dtheta log Bernoulli(theta=0.5)
    }
    for (int i = 0; i < n_agents; ++i) inner += reward * score[i];  // dot with all-ones
    if (inner > 0.0) ++positive;
  }
  return static_cast<double>(positive) / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Training log
// ---------------------------------------------------------------------------

struct TrainLogRow {
  std::int64_t slot = 0;
  double total_reward = 0.0;
  std::vector<double> agent_rewards;
  double critic_loss_mean = 0.0;     // NaN on slots with no update
  double actor_objective_mean = 0.0; // NaN on slots with no update
  int cue_outage_count = 0;
  int d2d_outage_count = 0;
  double sum_d2d_rate = 0.0;
};

// ---------------------------------------------------------------------------
// Trainer
// ---------------------------------------------------------------------------

class MarlTrainer {
 public:
  MarlTrainer(const Env& env, TrainerConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        seed_(seed),
        n_(env.config().cell.num_d2d),
        k_(env.config().cell.num_rbs),
        obs_dim_(env.observation_dim()),
        buffer_(cfg_.buffer_capacity) {
    cfg_.validate();
    if (cfg_.mode == CriticMode::kNaac && cfg_.lambda > n_ - 1)
      throw std::invalid_argument("MarlTrainer: lambda must be <= N-1");
    neighbors_ = build_neighbor_index(env.topology(),
                                      cfg_.mode == CriticMode::kNaac ? cfg_.lambda : n_ - 1);
    support_size_ = cfg_.mode == CriticMode::kNaac ? cfg_.lambda + 1 : n_;

    MLPSpec actor_spec;
    actor_spec.layer_sizes.push_back(obs_dim_);
    for (int h : cfg_.actor_hidden) actor_spec.layer_sizes.push_back(h);
    actor_spec.layer_sizes.push_back(k_);

    FusionCriticSpec critic_spec;
    critic_spec.state_dim = support_size_ * obs_dim_;
    critic_spec.action_dim = support_size_ * k_;
    critic_spec.hidden = cfg_.critic_hidden;

    for (int i = 0; i < n_; ++i) {
      actors_.push_back(init_weights(actor_spec, rng::mix(seed_, stream::kActorInit,
                                                          static_cast<std::uint64_t>(i))));
      critics_.push_back(init_fusion_critic(critic_spec, rng::mix(seed_, stream::kCriticInit,
                                                                  static_cast<std::uint64_t>(i))));
      actor_opts_.push_back(AdamState::for_net(actors_[i], cfg_.lr_actor));
      critic_opts_.push_back(FusionCriticAdam::for_critic(critics_[i], cfg_.lr_critic));
      actor_grads_.push_back(Gradients::zeros_like(actors_[i]));
      critic_grads_.push_back(FusionCriticGradients::zeros_like(critics_[i]));
      critic_scratch_.push_back(FusionCriticGradients::zeros_like(critics_[i]));
    }
    target_actors_ = actors_;
    target_critics_ = critics_;
  }

  const TrainerConfig& config() const { return cfg_; }
  int num_agents() const { return n_; }
  int num_rbs() const { return k_; }
  int support_size() const { return support_size_; }
  const NeighborIndex& neighbors() const { return neighbors_; }
  const std::vector<MLPNet>& actors() const { return actors_; }
  const std::vector<MLPNet>& target_actors() const { return target_actors_; }
  const std::vector<FusionCritic>& critics() const { return critics_; }
  const std::vector<FusionCritic>& target_critics() const { return target_critics_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  // Exploration temperature at global slot t, annealed linearly from
  // temp_start (first post-warmup slot) to temp_end (last slot).
  double temperature_at(std::int64_t slot, std::int64_t total_slots) const {
    const std::int64_t t0 = cfg_.warmup_slots;
    const std::int64_t t1 = total_slots - 1;
    if (slot <= t0 || t1 <= t0) return cfg_.temp_start;
    if (slot >= t1) return cfg_.temp_end;
    const double progress = static_cast<double>(slot - t0) / static_cast<double>(t1 - t0);
    return cfg_.temp_start + progress * (cfg_.temp_end - cfg_.temp_start);
  }

  // Runs `total_slots` slots on the environment (including warmup),
  // appending one log row per slot. Slot indices are env-global.
  std::vector<TrainLogRow> train(Env& env, std::int64_t total_slots) {
    if (env.config().cell.num_d2d != n_ || env.config().cell.num_rbs != k_)
      throw std::invalid_argument("MarlTrainer::train: env shape mismatch");
    std::vector<TrainLogRow> log;
    log.reserve(static_cast<std::size_t>(total_slots));
    const std::int64_t first = env.slot();
    for (std::int64_t t = first; t < first + total_slots; ++t) {
      auto states = env.normalized_observations();

      std::vector<int> joint(n_);
      std::vector<std::vector<double>> action_one_hots(n_);
      if (t < cfg_.warmup_slots) {
        for (int i = 0; i < n_; ++i) {
          joint[i] = static_cast<int>(rng::mix(seed_, stream::kWarmupAction,
                                               static_cast<std::uint64_t>(t),
                                               static_cast<std::uint64_t>(i)) %
                                      static_cast<std::uint64_t>(k_));
          action_one_hots[i].assign(k_, 0.0);
          action_one_hots[i][joint[i]] = 1.0;
        }
      } else {
        const double temp = temperature_at(t, first + total_slots);
        for (int i = 0; i < n_; ++i) {
          rng::SplitMix64 gen(rng::mix(seed_, stream::kExplore, static_cast<std::uint64_t>(t),
                                       static_cast<std::uint64_t>(i)));
          auto sel = select_action(actors_[i], states[i], {true, temp}, gen);
          joint[i] = sel.rb;
          action_one_hots[i] = std::move(sel.one_hot);
        }
      }

      StepOutcome outcome = env.step(joint);

      Transition tr;
      tr.states = std::move(states);
      tr.actions = std::move(action_one_hots);
      tr.rewards = outcome.rewards;
      tr.next_states.resize(n_);
      for (int i = 0; i < n_; ++i)
        tr.next_states[i] = normalized_observation(outcome.next_observations[i], env.config().norm);
      buffer_.push(std::move(tr));

      TrainLogRow row;
      row.slot = t;
      row.agent_rewards = outcome.rewards;
      for (double r : outcome.rewards) row.total_reward += r;
      for (bool o : outcome.cue_outages) row.cue_outage_count += o ? 1 : 0;
      for (bool o : outcome.d2d_outages) row.d2d_outage_count += o ? 1 : 0;
      row.sum_d2d_rate = sum_d2d_rate(outcome);
      row.critic_loss_mean = std::numeric_limits<double>::quiet_NaN();
      row.actor_objective_mean = std::numeric_limits<double>::quiet_NaN();

      if (t >= cfg_.warmup_slots) {
        rng::SplitMix64 sample_gen(rng::mix(seed_, stream::kSample, static_cast<std::uint64_t>(t)));
        auto indices = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size), sample_gen);
        if (indices) {
          const auto target_acts = target_actions_for(*indices);
          double loss_sum = 0.0, obj_sum = 0.0;
          for (int i = 0; i < n_; ++i) {
            loss_sum += critic_update(i, *indices, target_acts, t);
            obj_sum += actor_update(i, *indices, t);
          }
          for (int i = 0; i < n_; ++i) {
            soft_update(target_actors_[i], actors_[i], cfg_.tau);
            soft_update(target_critics_[i], critics_[i], cfg_.tau);
          }
          row.critic_loss_mean = loss_sum / n_;
          row.actor_objective_mean = obj_sum / n_;
        }
      }
      log.push_back(std::move(row));
    }
    return log;
  }

  // Target-network greedy actions for every agent on every sampled row.
  std::vector<std::vector<std::vector<double>>> target_actions_for(
      const std::vector<std::size_t>& indices) const {
    std::vector<std::vector<std::vector<double>>> acts(indices.size());
    for (std::size_t b = 0; b < indices.size(); ++b) {
      const Transition& tr = buffer_.at(indices[b]);
      acts[b].resize(n_);
      for (int j = 0; j < n_; ++j) {
        const auto logits = forward(target_actors_[j], tr.next_states[j]);
        acts[b][j].assign(k_, 0.0);
        acts[b][j][argmax(logits)] = 1.0;
      }
    }
    return acts;
  }

  // y_i per batch row: r_i + gamma * Q'_i(support next states, target actions).
  std::vector<double> critic_targets(int i, const std::vector<std::size_t>& indices,
                                     const std::vector<std::vector<std::vector<double>>>&
                                         target_acts) const {
    const auto& support = neighbors_.ascending[i];
    std::vector<double> ys(indices.size());
    FusionCriticCache cache;
    std::vector<double> s_buf, a_buf;
    for (std::size_t b = 0; b < indices.size(); ++b) {
      const Transition& tr = buffer_.at(indices[b]);
      gather(tr.next_states, support, s_buf);
      gather(target_acts[b], support, a_buf);
      const double q = critic_forward(target_critics_[i], s_buf, a_buf, cache);
      ys[b] = tr.rewards[i] + cfg_.gamma * q;
    }
    return ys;
  }

  // One optimizer step on critic i against the mean squared error to the
  // targets; returns the pre-step loss.
  double critic_update(int i, const std::vector<std::size_t>& indices,
                       const std::vector<std::vector<std::vector<double>>>& target_acts,
                       std::int64_t slot) {
    const auto ys = critic_targets(i, indices, target_acts);
    const auto& support = neighbors_.ascending[i];
    const double inv_b = 1.0 / static_cast<double>(indices.size());
    critic_grads_[i].zero();
    FusionCriticCache cache;
    std::vector<double> s_buf, a_buf;
    double loss = 0.0;
    for (std::size_t b = 0; b < indices.size(); ++b) {
      const Transition& tr = buffer_.at(indices[b]);
      gather(tr.states, support, s_buf);
      gather(tr.actions, support, a_buf);
      const double q = critic_forward(critics_[i], s_buf, a_buf, cache);
      const double diff = q - ys[b];
      loss += diff * diff * inv_b;
      critic_backward(critics_[i], cache, 2.0 * diff * inv_b, critic_grads_[i]);
    }
    if (!std::isfinite(loss)) fault(i, indices, slot, "non-finite critic loss");
    adam_step(critics_[i], critic_grads_[i], critic_opts_[i]);
    return loss;
  }

  // One ascent step on actor i through the critic's action input; other
  // agents' actions come from the batch. Returns the mean Q estimate.
  double actor_update(int i, const std::vector<std::size_t>& indices, std::int64_t slot) {
    const auto& support = neighbors_.ascending[i];
    const int pos_i = static_cast<int>(
        std::find(support.begin(), support.end(), i) - support.begin());
    const double inv_b = 1.0 / static_cast<double>(indices.size());
    const double relax_t = cfg_.relax_temperature;
    actor_grads_[i].zero();
    ForwardCache actor_cache;
    FusionCriticCache critic_cache;
    std::vector<double> s_buf, a_buf, d_logits(k_);
    double objective = 0.0;
    for (std::size_t b = 0; b < indices.size(); ++b) {
      const Transition& tr = buffer_.at(indices[b]);
      forward(actors_[i], tr.states[i], actor_cache);
      const auto relaxed = softmax(actor_cache.output(), relax_t);

      gather(tr.states, support, s_buf);
      gather(tr.actions, support, a_buf);
      std::copy(relaxed.begin(), relaxed.end(), a_buf.begin() + pos_i * k_);
      const double q = critic_forward(critics_[i], s_buf, a_buf, critic_cache);
      objective += q * inv_b;

      const auto input_grads = critic_backward(critics_[i], critic_cache, 1.0, critic_scratch_[i]);
      const double* d_relaxed = input_grads.d_action.data() + pos_i * k_;
      double inner = 0.0;
      for (int j = 0; j < k_; ++j) inner += d_relaxed[j] * relaxed[j];
      for (int j = 0; j < k_; ++j)
        d_logits[j] = relaxed[j] * (d_relaxed[j] - inner) / relax_t;
      backward(actors_[i], actor_cache, d_logits, actor_grads_[i]);
    }
    if (!std::isfinite(objective)) fault(i, indices, slot, "non-finite actor objective");
    actor_grads_[i].scale(-inv_b);  // ascend E[Q] with a minimizing optimizer
    adam_step(actors_[i], actor_grads_[i], actor_opts_[i]);
    return objective;
  }

  void save_actor_weights(const std::string& dir, bool target = true) const {
    const auto& nets = target ? target_actors_ : actors_;
    for (int i = 0; i < n_; ++i)
      save_net(nets[i], dir + "/actor_" + std::to_string(i) + ".mlpw");
  }

 private:
  void gather(const std::vector<std::vector<double>>& per_agent, const std::vector<int>& support,
              std::vector<double>& out) const {
    out.clear();
    for (int j : support) out.insert(out.end(), per_agent[j].begin(), per_agent[j].end());
  }

  [[noreturn]] void fault(int agent, const std::vector<std::size_t>& indices, std::int64_t slot,
                          const std::string& what) const {
    if (!cfg_.fault_dump_path.empty()) {
      std::ofstream os(cfg_.fault_dump_path);
      os << "# training fault: " << what << " agent=" << agent << " slot=" << slot << "\n";
      for (std::size_t b : indices) {
        const Transition& tr = buffer_.at(b);
        os << "row";
        for (const auto& s : tr.states)
          for (double v : s) os << ' ' << g17(v);
        for (const auto& a : tr.actions)
          for (double v : a) os << ' ' << g17(v);
        for (double r : tr.rewards) os << ' ' << g17(r);
        for (const auto& s : tr.next_states)
          for (double v : s) os << ' ' << g17(v);
        os << "\n";
      }
    }
    throw TrainingFault(what + " (agent " + std::to_string(agent) + ", slot " +
                        std::to_string(slot) + ")");
  }

  TrainerConfig cfg_;
  std::uint64_t seed_;
  int n_, k_, obs_dim_;
  int support_size_ = 0;
  NeighborIndex neighbors_;
  ReplayBuffer buffer_;
  std::vector<MLPNet> actors_, target_actors_;
  std::vector<FusionCritic> critics_, target_critics_;
  std::vector<AdamState> actor_opts_;
  std::vector<FusionCriticAdam> critic_opts_;
  std::vector<Gradients> actor_grads_;
  std::vector<FusionCriticGradients> critic_grads_, critic_scratch_;
};

struct TrainResult {
  std::vector<MLPNet> actors;         // deployed weights (target copies)
  std::vector<MLPNet> online_actors;
  std::vector<TrainLogRow> log;
};

inline TrainResult train_marl(Env& env, const TrainerConfig& cfg, std::uint64_t seed,
                              std::int64_t total_slots) {
  MarlTrainer trainer(env, cfg, seed);
  TrainResult result;
  result.log = trainer.train(env, total_slots);
  result.actors = trainer.target_actors();
  result.online_actors = trainer.actors();
  return result;
}

// ---------------------------------------------------------------------------
// Decentralized execution: each agent maps only its own observation through
// its actor and picks the argmax RB. No critic, no buffer, no access to any
// other agent's observation (enforced by this signature).
// ---------------------------------------------------------------------------

struct ExecutionMetrics {
  std::int64_t slots = 0;
  std::int64_t cue_link_slots = 0;
  std::int64_t d2d_link_slots = 0;
  std::int64_t cue_outage_link_slots = 0;
  std::int64_t d2d_outage_link_slots = 0;
  double total_sum_d2d_rate = 0.0;  // bits/s/Hz, summed over slots
  double total_sum_cue_rate = 0.0;
  double total_reward = 0.0;

  double cue_outage_probability() const {
    return cue_link_slots ? static_cast<double>(cue_outage_link_slots) / cue_link_slots : 0.0;
  }
  double d2d_outage_probability() const {
    return d2d_link_slots ? static_cast<double>(d2d_outage_link_slots) / d2d_link_slots : 0.0;
  }
  double mean_sum_d2d_rate() const { return slots ? total_sum_d2d_rate / slots : 0.0; }
  double mean_sum_cue_rate() const { return slots ? total_sum_cue_rate / slots : 0.0; }
  double mean_total_reward() const { return slots ? total_reward / slots : 0.0; }
};

inline void accumulate(ExecutionMetrics& m, const StepOutcome& outcome) {
  m.slots += 1;
  m.cue_link_slots += static_cast<std::int64_t>(outcome.cue_outages.size());
  m.d2d_link_slots += static_cast<std::int64_t>(outcome.d2d_outages.size());
  for (bool o : outcome.cue_outages) m.cue_outage_link_slots += o ? 1 : 0;
  for (bool o : outcome.d2d_outages) m.d2d_outage_link_slots += o ? 1 : 0;
  m.total_sum_d2d_rate += sum_d2d_rate(outcome);
  m.total_sum_cue_rate += sum_cue_rate(outcome);
  for (double r : outcome.rewards) m.total_reward += r;
}

template <class PerSlot>
ExecutionMetrics execute(Env& env, const std::vector<MLPNet>& actors, std::int64_t slots,
                         PerSlot&& per_slot) {
  const int n = env.config().cell.num_d2d;
  if (static_cast<int>(actors.size()) != n)
    throw std::invalid_argument("execute: actor count != N");
  for (const auto& a : actors)
    if (a.input_dim() != env.observation_dim() || a.output_dim() != env.config().cell.num_rbs)
      throw std::runtime_error("execute: actor shape does not match environment");
  ExecutionMetrics metrics;
  std::vector<int> joint(n);
  for (std::int64_t t = 0; t < slots; ++t) {
    const auto states = env.normalized_observations();
    for (int i = 0; i < n; ++i) joint[i] = argmax(forward(actors[i], states[i]));
    StepOutcome outcome = env.step(joint);
    accumulate(metrics, outcome);
    per_slot(env.slot() - 1, joint, outcome);
  }
  return metrics;
}

inline ExecutionMetrics execute(Env& env, const std::vector<MLPNet>& actors, std::int64_t slots) {
  return execute(env, actors, slots,
                 [](std::int64_t, const std::vector<int>&, const StepOutcome&) {});
}

}  // namespace d2dmarl
