#pragma once

// Single-cell downlink radio model: geometry, pathloss, per-slot channel
// gains, noise and SINR/rate math for a cellular network underlaid with
// D2D pairs. All SINR arithmetic is done in linear watts; dB/dBm appear
// only at configuration and reporting boundaries.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmarl/rng.hpp"

namespace d2dmarl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// ---------------------------------------------------------------------------
// Unit conversions
// ---------------------------------------------------------------------------

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) {
  if (watts <= 0.0) throw std::domain_error("watts_to_dbm: non-positive power");
  return 10.0 * std::log10(watts) + 30.0;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear) {
  if (linear <= 0.0) throw std::domain_error("linear_to_db: non-positive value");
  return 10.0 * std::log10(linear);
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct CellConfig {
  double cell_radius_m = 500.0;
  double max_d2d_distance_m = 30.0;
  int num_cues = 10;  // M
  int num_d2d = 10;   // N
  int num_rbs = 10;   // K
  double carrier_freq_hz = 2.0e9;  // metadata only, not used in the math
  double rb_bandwidth_hz = 180.0e3;
  double p_bs_dbm = 46.0;
  double p_d2d_dbm = 13.0;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 8.0;
  double cue_sinr_threshold_db = 0.0;
  bool fading = true;

  double p_bs_watts() const { return dbm_to_watts(p_bs_dbm); }
  double p_d2d_watts() const { return dbm_to_watts(p_d2d_dbm); }
  double cue_sinr_threshold_linear() const { return db_to_linear(cue_sinr_threshold_db); }

  void validate() const {
    if (num_cues < 1 || num_d2d < 1 || num_rbs < 1)
      throw std::invalid_argument("CellConfig: M, N, K must all be >= 1");
    if (!(cell_radius_m > max_d2d_distance_m) || !(max_d2d_distance_m > 0.0))
      throw std::invalid_argument("CellConfig: need cell_radius > max_d2d_distance > 0");
    if (!(rb_bandwidth_hz > 0.0))
      throw std::invalid_argument("CellConfig: rb_bandwidth must be positive");
  }
};

// Positions of everything in the cell. The base station sits at the origin.
struct CellTopology {
  Vec2 bs{0.0, 0.0};
  std::vector<Vec2> cue_positions;
  std::vector<Vec2> d2d_tx_positions;
  std::vector<Vec2> d2d_rx_positions;
  std::vector<int> rb_of_cue;  // CUE m transmits on RB rb_of_cue[m]

  int num_cues() const { return static_cast<int>(cue_positions.size()); }
  int num_d2d() const { return static_cast<int>(d2d_tx_positions.size()); }
};

// All link gains for one time slot, linear scale.
struct ChannelRealization {
  std::vector<double> g_bc;                  // BS -> CUE_m, length M
  std::vector<double> g_tr;                  // D2D_n tx -> rx, length N
  std::vector<std::vector<double>> g_tc;     // D2D_n tx -> CUE_m, N x M
  std::vector<double> g_br;                  // BS -> D2D_n rx, length N
  std::vector<double> g_bt;                  // BS -> D2D_n tx, length N (observations)
  std::vector<std::vector<double>> g_tr_cross;  // D2D_i tx -> D2D_n rx, N x N, diag unused
  double noise_watts = 0.0;
};

// ---------------------------------------------------------------------------
// Pathloss and noise
// ---------------------------------------------------------------------------

// BS <-> UE links: 128.1 + 37.6 log10(d[km]).
inline double pathloss_cellular_db(double d_m) {
  if (!(d_m > 0.0)) throw std::domain_error("pathloss_cellular_db: distance must be positive");
  return 128.1 + 37.6 * std::log10(d_m / 1000.0);
}

// UE <-> UE links, pathloss exponent 4 with the same 1 km intercept.
inline double pathloss_d2d_db(double d_m) {
  if (!(d_m > 0.0)) throw std::domain_error("pathloss_d2d_db: distance must be positive");
  return 128.1 + 40.0 * std::log10(d_m / 1000.0);
}

// Thermal noise over one RB, including the UE noise figure.
inline double noise_power_watts(const CellConfig& config) {
  const double dbm = config.noise_density_dbm_hz +
                     10.0 * std::log10(config.rb_bandwidth_hz) + config.noise_figure_db;
  return dbm_to_watts(dbm);
}

// ---------------------------------------------------------------------------
// Placement
// ---------------------------------------------------------------------------

namespace detail {

inline Vec2 uniform_in_disk(rng::SplitMix64& gen, const Vec2& center, double radius) {
  const double r = radius * std::sqrt(gen.next_unit());
  const double theta = 2.0 * M_PI * gen.next_unit();
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace detail

// Uniform placement of CUEs and D2D transmitters in the cell disk; each D2D
// receiver uniform in a disk of max_d2d_distance around its transmitter,
// resampled until it falls inside the cell. Deterministic given the seed.
inline CellTopology place_users(const CellConfig& config, std::uint64_t seed) {
  config.validate();
  constexpr int kMaxResample = 10000;

  rng::SplitMix64 gen(rng::mix(seed, 0x706C6163ULL));  // placement stream
  CellTopology topo;
  topo.cue_positions.reserve(config.num_cues);
  for (int m = 0; m < config.num_cues; ++m)
    topo.cue_positions.push_back(detail::uniform_in_disk(gen, topo.bs, config.cell_radius_m));

  topo.d2d_tx_positions.reserve(config.num_d2d);
  topo.d2d_rx_positions.reserve(config.num_d2d);
  for (int n = 0; n < config.num_d2d; ++n) {
    const Vec2 tx = detail::uniform_in_disk(gen, topo.bs, config.cell_radius_m);
    Vec2 rx;
    int tries = 0;
    do {
      if (++tries > kMaxResample)
        throw std::runtime_error("place_users: receiver resampling cap exhausted");
      rx = detail::uniform_in_disk(gen, tx, config.max_d2d_distance_m);
    } while (distance(rx, topo.bs) > config.cell_radius_m);
    topo.d2d_tx_positions.push_back(tx);
    topo.d2d_rx_positions.push_back(rx);
  }

  // Each CUE has its own RB; identity mapping (requires M == K to be a
  // bijection, which every supported scenario uses).
  topo.rb_of_cue.resize(config.num_cues);
  for (int m = 0; m < config.num_cues; ++m) topo.rb_of_cue[m] = m % config.num_rbs;
  return topo;
}

// ---------------------------------------------------------------------------
// Channel realization
// ---------------------------------------------------------------------------

namespace detail {

enum class LinkKind : std::uint64_t {
  kBsCue = 1,
  kD2dPair = 2,
  kTxCue = 3,
  kBsRx = 4,
  kBsTx = 5,
  kCross = 6,
};

// Distances below 1 m are clamped (minimum coupling loss) so co-located
// endpoints cannot produce unbounded gains.
inline double pathloss_gain(double d_m, bool cellular) {
  const double d = std::max(d_m, 1.0);
  const double pl = cellular ? pathloss_cellular_db(d) : pathloss_d2d_db(d);
  return db_to_linear(-pl);
}

inline double fading_factor(const CellConfig& config, std::uint64_t seed, std::int64_t slot,
                            LinkKind kind, int i, int j) {
  if (!config.fading) return 1.0;
  const std::uint64_t h =
      rng::mix(seed, static_cast<std::uint64_t>(slot), static_cast<std::uint64_t>(kind),
               static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
  return rng::exponential_unit_mean(rng::u64_to_unit(h));
}

}  // namespace detail

// Gains for one slot: pathloss times an i.i.d. unit-mean exponential fading
// factor per link (Rayleigh envelope), keyed by (seed, slot, link) so the
// realization is reproducible independent of evaluation order.
inline ChannelRealization realize_channel(const CellTopology& topo, const CellConfig& config,
                                          std::uint64_t seed, std::int64_t slot) {
  using detail::LinkKind;
  const int m_count = topo.num_cues();
  const int n_count = topo.num_d2d();

  ChannelRealization ch;
  ch.noise_watts = noise_power_watts(config);

  ch.g_bc.resize(m_count);
  for (int m = 0; m < m_count; ++m) {
    ch.g_bc[m] = detail::pathloss_gain(distance(topo.bs, topo.cue_positions[m]), true) *
                 detail::fading_factor(config, seed, slot, LinkKind::kBsCue, m, 0);
  }

  ch.g_tr.resize(n_count);
  ch.g_br.resize(n_count);
  ch.g_bt.resize(n_count);
  for (int n = 0; n < n_count; ++n) {
    ch.g_tr[n] =
        detail::pathloss_gain(distance(topo.d2d_tx_positions[n], topo.d2d_rx_positions[n]), false) *
        detail::fading_factor(config, seed, slot, LinkKind::kD2dPair, n, 0);
    ch.g_br[n] = detail::pathloss_gain(distance(topo.bs, topo.d2d_rx_positions[n]), true) *
                 detail::fading_factor(config, seed, slot, LinkKind::kBsRx, n, 0);
    ch.g_bt[n] = detail::pathloss_gain(distance(topo.bs, topo.d2d_tx_positions[n]), true) *
                 detail::fading_factor(config, seed, slot, LinkKind::kBsTx, n, 0);
  }

  ch.g_tc.assign(n_count, std::vector<double>(m_count));
  for (int n = 0; n < n_count; ++n)
    for (int m = 0; m < m_count; ++m)
      ch.g_tc[n][m] =
          detail::pathloss_gain(distance(topo.d2d_tx_positions[n], topo.cue_positions[m]), false) *
          detail::fading_factor(config, seed, slot, LinkKind::kTxCue, n, m);

  ch.g_tr_cross.assign(n_count, std::vector<double>(n_count, 0.0));
  for (int i = 0; i < n_count; ++i)
    for (int n = 0; n < n_count; ++n) {
      if (i == n) continue;
      ch.g_tr_cross[i][n] =
          detail::pathloss_gain(distance(topo.d2d_tx_positions[i], topo.d2d_rx_positions[n]), false) *
          detail::fading_factor(config, seed, slot, LinkKind::kCross, i, n);
    }

  return ch;
}

// ---------------------------------------------------------------------------
// SINR and rates
// ---------------------------------------------------------------------------

// SINR at CUE m on its RB k under the joint D2D allocation `alloc`
// (alloc[n] = RB of pair n). Caller guarantees rb_of_cue[m] == k.
inline double cue_sinr(int m, int k, std::span<const int> alloc, const ChannelRealization& ch,
                       const CellConfig& config) {
  const double signal = config.p_bs_watts() * ch.g_bc[m];
  double denom = ch.noise_watts;
  const double p_d2d = config.p_d2d_watts();
  for (std::size_t n = 0; n < alloc.size(); ++n)
    if (alloc[n] == k) denom += p_d2d * ch.g_tc[n][m];
  return signal / denom;
}

// SINR at the receiver of D2D pair n on RB k = alloc[n]: BS interference on
// every RB plus co-channel D2D pairs.
inline double d2d_sinr(int n, int k, std::span<const int> alloc, const ChannelRealization& ch,
                       const CellConfig& config) {
  const double signal = config.p_d2d_watts() * ch.g_tr[n];
  double denom = ch.noise_watts + config.p_bs_watts() * ch.g_br[n];
  const double p_d2d = config.p_d2d_watts();
  for (std::size_t i = 0; i < alloc.size(); ++i)
    if (static_cast<int>(i) != n && alloc[i] == k) denom += p_d2d * ch.g_tr_cross[i][n];
  return signal / denom;
}

inline double link_rate_bps_hz(double sinr) {
  if (sinr < 0.0) throw std::domain_error("link_rate: negative SINR");
  return std::log2(1.0 + sinr);
}

inline double link_rate_bps(double sinr, double bandwidth_hz) {
  return bandwidth_hz * link_rate_bps_hz(sinr);
}

}  // namespace d2dmarl
