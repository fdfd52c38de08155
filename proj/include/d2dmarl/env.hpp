#pragma once

// N-agent Markov game on top of the radio model: each agent is one D2D pair
// choosing a resource block per slot; rewards follow the shared-CUE
// protection rule (positive Shannon rate when the co-channel cellular link
// stays above its SINR threshold, a fixed negative reward otherwise).

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "d2dmarl/radio.hpp"
#include "d2dmarl/rng.hpp"

namespace d2dmarl {

// Raw (linear-scale) per-agent observation; networks consume the normalized
// dB-scale vector produced by normalized_observation().
struct AgentObservation {
  double g_d = 0.0;    // own D2D link gain, current slot
  double g_c = 0.0;    // BS -> own D2D transmitter gain, current slot
  double i_prev = 0.0; // interference power at own receiver last slot, watts
  std::vector<double> k_prev;  // one-hot previous RB choice (all-zero at t=0)
};

// Fixed affine dB-scale normalization. Raw gains span ~10 orders of
// magnitude; mapping dB values into roughly [-1, 1] (hard-clamped to [-3, 3])
// keeps network inputs well-conditioned. Centers/half-widths are derived
// from the pathloss range of the default cell geometry.
struct ObsNormalization {
  double g_d_center_db = -70.0;
  double g_d_half_db = 40.0;
  double g_c_center_db = -100.0;
  double g_c_half_db = 50.0;
  double i_center_dbw = -95.0;
  double i_half_dbw = 35.0;
  double clamp = 3.0;

  double apply(double value_db, double center, double half) const {
    const double z = (value_db - center) / half;
    return std::min(clamp, std::max(-clamp, z));
  }
};

inline std::vector<double> normalized_observation(const AgentObservation& obs,
                                                  const ObsNormalization& norm) {
  std::vector<double> v;
  v.reserve(3 + obs.k_prev.size());
  constexpr double kFloor = 1e-30;  // keeps log10 finite; zero maps to the clamp
  v.push_back(norm.apply(10.0 * std::log10(std::max(obs.g_d, kFloor)), norm.g_d_center_db,
                         norm.g_d_half_db));
  v.push_back(norm.apply(10.0 * std::log10(std::max(obs.g_c, kFloor)), norm.g_c_center_db,
                         norm.g_c_half_db));
  v.push_back(norm.apply(10.0 * std::log10(std::max(obs.i_prev, kFloor)), norm.i_center_dbw,
                         norm.i_half_dbw));
  v.insert(v.end(), obs.k_prev.begin(), obs.k_prev.end());
  return v;
}

struct EnvConfig {
  CellConfig cell;
  double r_neg = -1.0;  // reward when the shared CUE's SINR constraint fails
  ObsNormalization norm;

  void validate() const {
    cell.validate();
    if (!(r_neg < 0.0)) throw std::invalid_argument("EnvConfig: r_neg must be negative");
  }
};

struct StepOutcome {
  std::vector<double> rewards;                     // length N
  std::vector<AgentObservation> next_observations; // length N
  std::vector<double> cue_sinrs;                   // length M, linear
  std::vector<double> d2d_sinrs;                   // length N, linear
  std::vector<bool> cue_outages;                   // length M
  std::vector<bool> d2d_outages;                   // length N
  std::vector<double> d2d_rates;                   // length N, bits/s/Hz
  std::vector<double> cue_rates;                   // length M, bits/s/Hz
};

// Outage convention: a link is served iff sinr >= threshold (equality is not
// an outage).
inline bool cue_outage_indicator(double sinr_linear, double threshold_db) {
  return sinr_linear < db_to_linear(threshold_db);
}

inline double sum_d2d_rate(const StepOutcome& outcome) {
  double total = 0.0;
  for (double r : outcome.d2d_rates) total += r;
  return total;
}

inline double sum_cue_rate(const StepOutcome& outcome) {
  double total = 0.0;
  for (double r : outcome.cue_rates) total += r;
  return total;
}

// One episode-less environment instance. Topology is drawn once at reset;
// fading is redrawn every slot. step() is a pure function of (state, joint
// action): no policy object ever enters the transition.
class Env {
 public:
  Env(EnvConfig config, std::uint64_t seed)
      : config_(std::move(config)), seed_(seed) {
    config_.validate();
    topology_ = place_users(config_.cell, seed_);
    slot_ = 0;
    channel_ = realize_channel(topology_, config_.cell, seed_, slot_);
    observations_.assign(static_cast<std::size_t>(config_.cell.num_d2d), AgentObservation{});
    for (int n = 0; n < config_.cell.num_d2d; ++n) {
      observations_[n].g_d = channel_.g_tr[n];
      observations_[n].g_c = channel_.g_bt[n];
      observations_[n].i_prev = 0.0;
      observations_[n].k_prev.assign(static_cast<std::size_t>(config_.cell.num_rbs), 0.0);
    }
  }

  const EnvConfig& config() const { return config_; }
  const CellTopology& topology() const { return topology_; }
  const ChannelRealization& channel() const { return channel_; }
  std::int64_t slot() const { return slot_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<AgentObservation>& observations() const { return observations_; }

  std::vector<std::vector<double>> normalized_observations() const {
    std::vector<std::vector<double>> out;
    out.reserve(observations_.size());
    for (const auto& obs : observations_) out.push_back(normalized_observation(obs, config_.norm));
    return out;
  }

  int observation_dim() const { return 3 + config_.cell.num_rbs; }

  // Applies the joint allocation on the current channel, then advances the
  // slot and redraws fading for the next observations.
  StepOutcome step(std::span<const int> joint_action) {
    const int n_count = config_.cell.num_d2d;
    const int m_count = config_.cell.num_cues;
    const int k_count = config_.cell.num_rbs;
    if (static_cast<int>(joint_action.size()) != n_count)
      throw std::invalid_argument("Env::step: joint action length != N");
    for (int a : joint_action)
      if (a < 0 || a >= k_count) throw std::out_of_range("Env::step: RB index out of range");

    StepOutcome out;
    out.cue_sinrs.resize(m_count);
    out.cue_rates.resize(m_count);
    out.cue_outages.resize(m_count);
    for (int m = 0; m < m_count; ++m) {
      out.cue_sinrs[m] = cue_sinr(m, topology_.rb_of_cue[m], joint_action, channel_, config_.cell);
      out.cue_rates[m] = link_rate_bps_hz(out.cue_sinrs[m]);
      out.cue_outages[m] = cue_outage_indicator(out.cue_sinrs[m], config_.cell.cue_sinr_threshold_db);
    }

    out.d2d_sinrs.resize(n_count);
    out.d2d_rates.resize(n_count);
    out.d2d_outages.resize(n_count);
    out.rewards.resize(n_count);
    std::vector<double> interference(n_count);
    const double threshold_linear = config_.cell.cue_sinr_threshold_linear();
    for (int n = 0; n < n_count; ++n) {
      const int k = joint_action[n];
      out.d2d_sinrs[n] = d2d_sinr(n, k, joint_action, channel_, config_.cell);
      out.d2d_rates[n] = link_rate_bps_hz(out.d2d_sinrs[n]);
      out.d2d_outages[n] = out.d2d_sinrs[n] < threshold_linear;

      // Interference measured at receiver n this slot (denominator terms of
      // the SINR excluding noise and own signal).
      double interf = config_.cell.p_bs_watts() * channel_.g_br[n];
      for (int i = 0; i < n_count; ++i)
        if (i != n && joint_action[i] == k)
          interf += config_.cell.p_d2d_watts() * channel_.g_tr_cross[i][n];
      interference[n] = interf;

      // Reward: protect the CUE sharing RB k. If no CUE occupies RB k the
      // constraint is vacuously satisfied.
      bool constraint_ok = true;
      for (int m = 0; m < m_count; ++m)
        if (topology_.rb_of_cue[m] == k && out.cue_sinrs[m] < threshold_linear) {
          constraint_ok = false;
          break;
        }
      out.rewards[n] = constraint_ok ? out.d2d_rates[n] : config_.r_neg;
    }

    // Advance: new fading realization, next observations.
    slot_ += 1;
    channel_ = realize_channel(topology_, config_.cell, seed_, slot_);
    out.next_observations.resize(n_count);
    for (int n = 0; n < n_count; ++n) {
      AgentObservation& obs = out.next_observations[n];
      obs.g_d = channel_.g_tr[n];
      obs.g_c = channel_.g_bt[n];
      obs.i_prev = interference[n];
      obs.k_prev.assign(static_cast<std::size_t>(k_count), 0.0);
      obs.k_prev[joint_action[n]] = 1.0;
    }
    observations_ = out.next_observations;
    return out;
  }

 private:
  EnvConfig config_;
  std::uint64_t seed_ = 0;
  CellTopology topology_;
  ChannelRealization channel_;
  std::int64_t slot_ = 0;
  std::vector<AgentObservation> observations_;
};

}  // namespace d2dmarl
