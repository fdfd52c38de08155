#pragma once

// Reproduction harness: resolves a structured config, runs sweeps of
// (algorithm, sweep value, seed) jobs, and emits versioned CSV metrics plus
// weight files. Every output embeds the hash of the fully resolved config;
// identical (config, seeds) reproduce byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "d2dmarl/baselines.hpp"
#include "d2dmarl/env.hpp"
#include "d2dmarl/format.hpp"
#include "d2dmarl/marl.hpp"

namespace d2dmarl {

inline constexpr const char* kOutputDirEnvVar = "D2DMARL_OUTPUT_DIR";

// ---------------------------------------------------------------------------
// Algorithm selector
// ---------------------------------------------------------------------------

enum class Algorithm { kMaac, kNaac, kQLearning, kDqn, kIndependentAc, kSla, kRandom };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMaac: return "maac";
    case Algorithm::kNaac: return "naac";
    case Algorithm::kQLearning: return "ql";
    case Algorithm::kDqn: return "dqn";
    case Algorithm::kIndependentAc: return "ac";
    case Algorithm::kSla: return "sla";
    case Algorithm::kRandom: return "random";
  }
  throw std::logic_error("unreachable");
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "maac") return Algorithm::kMaac;
  if (s == "naac") return Algorithm::kNaac;
  if (s == "ql") return Algorithm::kQLearning;
  if (s == "dqn") return Algorithm::kDqn;
  if (s == "ac") return Algorithm::kIndependentAc;
  if (s == "sla") return Algorithm::kSla;
  if (s == "random") return Algorithm::kRandom;
  throw std::invalid_argument("unknown algorithm '" + s + "' (maac|naac|ql|dqn|ac|sla|random)");
}

enum class SweepAxis { kNone, kNumD2d, kLambda };

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kNumD2d: return "num_d2d";
    case SweepAxis::kLambda: return "lambda";
  }
  throw std::logic_error("unreachable");
}

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "none") return SweepAxis::kNone;
  if (s == "num_d2d") return SweepAxis::kNumD2d;
  if (s == "lambda") return SweepAxis::kLambda;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (none|num_d2d|lambda)");
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  EnvConfig env;
  TrainerConfig trainer;
  QLearningConfig ql;
  DqnConfig dqn;
  SlaConfig sla;
  Algorithm algorithm = Algorithm::kMaac;
  std::int64_t train_slots = 20000;  // includes warmup
  std::int64_t eval_slots = 2000;
  std::vector<std::uint64_t> seeds{1};
  SweepAxis sweep = SweepAxis::kNone;
  std::vector<int> sweep_values;
  std::string output_dir = "out";

  void validate() const {
    env.validate();
    trainer.validate();
    ql.validate();
    dqn.validate();
    sla.validate();
    if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: need at least one seed");
    if (train_slots < 0 || eval_slots < 1)
      throw std::invalid_argument("ExperimentConfig: train_slots >= 0, eval_slots >= 1");
    if (sweep == SweepAxis::kNumD2d)
      for (int v : sweep_values)
        if (v < 1) throw std::invalid_argument("ExperimentConfig: num_d2d sweep values must be >= 1");
    if (sweep == SweepAxis::kLambda) {
      if (algorithm != Algorithm::kNaac)
        throw std::invalid_argument("ExperimentConfig: lambda sweep applies to the naac algorithm");
      for (int v : sweep_values)
        if (v < 0 || v > env.cell.num_d2d - 1)
          throw std::invalid_argument("ExperimentConfig: lambda sweep values must be in [0, N-1]");
    }
    if (algorithm == Algorithm::kNaac && trainer.lambda > env.cell.num_d2d - 1)
      throw std::invalid_argument("ExperimentConfig: trainer.lambda must be <= N-1");
  }

  // Effective sweep values (defaults cover the standard study ranges).
  std::vector<int> resolved_sweep_values() const {
    if (sweep == SweepAxis::kNone) return {0};
    if (!sweep_values.empty()) return sweep_values;
    if (sweep == SweepAxis::kNumD2d) return {10, 20, 30, 40, 50};
    std::vector<int> lambdas;
    for (int l = 2; l <= env.cell.num_d2d - 1; ++l) lambdas.push_back(l);
    return lambdas;
  }
};

// ---------------------------------------------------------------------------
// JSON serialization (canonical form: nlohmann objects sort keys, so dump()
// of the resolved config is a stable hashing target)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["cell"] = {{"cell_radius_m", c.env.cell.cell_radius_m},
               {"max_d2d_distance_m", c.env.cell.max_d2d_distance_m},
               {"num_cues", c.env.cell.num_cues},
               {"num_d2d", c.env.cell.num_d2d},
               {"num_rbs", c.env.cell.num_rbs},
               {"carrier_freq_hz", c.env.cell.carrier_freq_hz},
               {"rb_bandwidth_hz", c.env.cell.rb_bandwidth_hz},
               {"p_bs_dbm", c.env.cell.p_bs_dbm},
               {"p_d2d_dbm", c.env.cell.p_d2d_dbm},
               {"noise_density_dbm_hz", c.env.cell.noise_density_dbm_hz},
               {"noise_figure_db", c.env.cell.noise_figure_db},
               {"cue_sinr_threshold_db", c.env.cell.cue_sinr_threshold_db},
               {"fading", c.env.cell.fading}};
  j["r_neg"] = c.env.r_neg;
  j["obs_norm"] = {{"g_d_center_db", c.env.norm.g_d_center_db},
                   {"g_d_half_db", c.env.norm.g_d_half_db},
                   {"g_c_center_db", c.env.norm.g_c_center_db},
                   {"g_c_half_db", c.env.norm.g_c_half_db},
                   {"i_center_dbw", c.env.norm.i_center_dbw},
                   {"i_half_dbw", c.env.norm.i_half_dbw},
                   {"clamp", c.env.norm.clamp}};
  j["trainer"] = {{"mode", to_string(c.trainer.mode)},
                  {"lambda", c.trainer.lambda},
                  {"gamma", c.trainer.gamma},
                  {"tau", c.trainer.tau},
                  {"batch_size", c.trainer.batch_size},
                  {"lr_actor", c.trainer.lr_actor},
                  {"lr_critic", c.trainer.lr_critic},
                  {"warmup_slots", c.trainer.warmup_slots},
                  {"temp_start", c.trainer.temp_start},
                  {"temp_end", c.trainer.temp_end},
                  {"relax_temperature", c.trainer.relax_temperature},
                  {"buffer_capacity", c.trainer.buffer_capacity},
                  {"actor_hidden", c.trainer.actor_hidden},
                  {"critic_hidden", c.trainer.critic_hidden}};
  j["ql"] = {{"alpha", c.ql.alpha},
             {"gamma", c.ql.gamma},
             {"eps_start", c.ql.eps_start},
             {"eps_end", c.ql.eps_end},
             {"bins", c.ql.bins}};
  j["dqn"] = {{"gamma", c.dqn.gamma},
              {"tau", c.dqn.tau},
              {"lr", c.dqn.lr},
              {"batch_size", c.dqn.batch_size},
              {"warmup_slots", c.dqn.warmup_slots},
              {"eps_start", c.dqn.eps_start},
              {"eps_end", c.dqn.eps_end},
              {"buffer_capacity", c.dqn.buffer_capacity},
              {"hidden", c.dqn.hidden}};
  j["sla"] = {{"b", c.sla.b}};
  j["algorithm"] = to_string(c.algorithm);
  j["train_slots"] = c.train_slots;
  j["eval_slots"] = c.eval_slots;
  j["seeds"] = c.seeds;
  j["sweep"] = to_string(c.sweep);
  j["sweep_values"] = c.sweep_values;
  j["output_dir"] = c.output_dir;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;  // defaults
  if (j.contains("cell")) {
    const auto& s = j.at("cell");
    auto& cell = c.env.cell;
    cell.cell_radius_m = s.value("cell_radius_m", cell.cell_radius_m);
    cell.max_d2d_distance_m = s.value("max_d2d_distance_m", cell.max_d2d_distance_m);
    cell.num_cues = s.value("num_cues", cell.num_cues);
    cell.num_d2d = s.value("num_d2d", cell.num_d2d);
    cell.num_rbs = s.value("num_rbs", cell.num_rbs);
    cell.carrier_freq_hz = s.value("carrier_freq_hz", cell.carrier_freq_hz);
    cell.rb_bandwidth_hz = s.value("rb_bandwidth_hz", cell.rb_bandwidth_hz);
    cell.p_bs_dbm = s.value("p_bs_dbm", cell.p_bs_dbm);
    cell.p_d2d_dbm = s.value("p_d2d_dbm", cell.p_d2d_dbm);
    cell.noise_density_dbm_hz = s.value("noise_density_dbm_hz", cell.noise_density_dbm_hz);
    cell.noise_figure_db = s.value("noise_figure_db", cell.noise_figure_db);
    cell.cue_sinr_threshold_db = s.value("cue_sinr_threshold_db", cell.cue_sinr_threshold_db);
    cell.fading = s.value("fading", cell.fading);
  }
  c.env.r_neg = j.value("r_neg", c.env.r_neg);
  if (j.contains("obs_norm")) {
    const auto& s = j.at("obs_norm");
    auto& n = c.env.norm;
    n.g_d_center_db = s.value("g_d_center_db", n.g_d_center_db);
    n.g_d_half_db = s.value("g_d_half_db", n.g_d_half_db);
    n.g_c_center_db = s.value("g_c_center_db", n.g_c_center_db);
    n.g_c_half_db = s.value("g_c_half_db", n.g_c_half_db);
    n.i_center_dbw = s.value("i_center_dbw", n.i_center_dbw);
    n.i_half_dbw = s.value("i_half_dbw", n.i_half_dbw);
    n.clamp = s.value("clamp", n.clamp);
  }
  if (j.contains("trainer")) {
    const auto& s = j.at("trainer");
    auto& t = c.trainer;
    t.mode = s.value("mode", std::string("maac")) == "naac" ? CriticMode::kNaac : CriticMode::kMaac;
    t.lambda = s.value("lambda", t.lambda);
    t.gamma = s.value("gamma", t.gamma);
    t.tau = s.value("tau", t.tau);
    t.batch_size = s.value("batch_size", t.batch_size);
    t.lr_actor = s.value("lr_actor", t.lr_actor);
    t.lr_critic = s.value("lr_critic", t.lr_critic);
    t.warmup_slots = s.value("warmup_slots", t.warmup_slots);
    t.temp_start = s.value("temp_start", t.temp_start);
    t.temp_end = s.value("temp_end", t.temp_end);
    t.relax_temperature = s.value("relax_temperature", t.relax_temperature);
    t.buffer_capacity = s.value("buffer_capacity", t.buffer_capacity);
    t.actor_hidden = s.value("actor_hidden", t.actor_hidden);
    t.critic_hidden = s.value("critic_hidden", t.critic_hidden);
  }
  if (j.contains("ql")) {
    const auto& s = j.at("ql");
    c.ql.alpha = s.value("alpha", c.ql.alpha);
    c.ql.gamma = s.value("gamma", c.ql.gamma);
    c.ql.eps_start = s.value("eps_start", c.ql.eps_start);
    c.ql.eps_end = s.value("eps_end", c.ql.eps_end);
    c.ql.bins = s.value("bins", c.ql.bins);
  }
  if (j.contains("dqn")) {
    const auto& s = j.at("dqn");
    c.dqn.gamma = s.value("gamma", c.dqn.gamma);
    c.dqn.tau = s.value("tau", c.dqn.tau);
    c.dqn.lr = s.value("lr", c.dqn.lr);
    c.dqn.batch_size = s.value("batch_size", c.dqn.batch_size);
    c.dqn.warmup_slots = s.value("warmup_slots", c.dqn.warmup_slots);
    c.dqn.eps_start = s.value("eps_start", c.dqn.eps_start);
    c.dqn.eps_end = s.value("eps_end", c.dqn.eps_end);
    c.dqn.buffer_capacity = s.value("buffer_capacity", c.dqn.buffer_capacity);
    c.dqn.hidden = s.value("hidden", c.dqn.hidden);
  }
  if (j.contains("sla")) c.sla.b = j.at("sla").value("b", c.sla.b);
  c.algorithm = parse_algorithm(j.value("algorithm", std::string("maac")));
  c.train_slots = j.value("train_slots", c.train_slots);
  c.eval_slots = j.value("eval_slots", c.eval_slots);
  c.seeds = j.value("seeds", c.seeds);
  c.sweep = parse_sweep_axis(j.value("sweep", std::string("none")));
  c.sweep_values = j.value("sweep_values", c.sweep_values);
  c.output_dir = j.value("output_dir", c.output_dir);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
  return buf;
}

// Env var override for the output directory.
inline std::string resolve_output_dir(const ExperimentConfig& c) {
  if (const char* dir = std::getenv(kOutputDirEnvVar); dir && *dir) return dir;
  return c.output_dir;
}

// ---------------------------------------------------------------------------
// Metric records and CSV emission
// ---------------------------------------------------------------------------

struct MetricsRecord {
  std::string algorithm;
  int n_d2d = 0;
  int lambda = -1;  // -1 = not applicable (full critic scope or no critic)
  std::uint64_t seed = 0;
  std::int64_t train_slots = 0;
  std::int64_t eval_slots = 0;
  double cue_outage_prob = 0.0;
  double d2d_outage_prob = 0.0;
  double mean_sum_d2d_rate = 0.0;
  double mean_sum_cue_rate = 0.0;
  double mean_total_reward = 0.0;
  std::string status = "ok";  // "ok" or "fault"
};

inline constexpr const char* kMetricsSchema = "metrics-v1";
inline constexpr const char* kSummarySchema = "metrics-summary-v1";
inline constexpr const char* kTrainlogSchema = "trainlog-v1";
inline constexpr const char* kCurveSchema = "reward-curve-v1";
inline constexpr const char* kCompareSchema = "compare-v1";

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records,
                              const std::string& cfg_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "# schema=" << kMetricsSchema << " config=" << cfg_hash << "\n";
  os << "algorithm,n_d2d,lambda,seed,train_slots,eval_slots,cue_outage_prob,d2d_outage_prob,"
        "mean_sum_d2d_rate,mean_sum_cue_rate,mean_total_reward,status\n";
  for (const auto& r : records) {
    os << r.algorithm << ',' << r.n_d2d << ',' << r.lambda << ',' << r.seed << ','
       << r.train_slots << ',' << r.eval_slots << ',' << g17(r.cue_outage_prob) << ','
       << g17(r.d2d_outage_prob) << ',' << g17(r.mean_sum_d2d_rate) << ','
       << g17(r.mean_sum_cue_rate) << ',' << g17(r.mean_total_reward) << ',' << r.status << "\n";
  }
}

struct SummaryRecord {
  std::string algorithm;
  int n_d2d = 0;
  int lambda = -1;
  int n_seeds = 0;
  std::int64_t train_slots = 0;
  std::int64_t eval_slots = 0;
  double cue_outage_prob = 0.0;
  double d2d_outage_prob = 0.0;
  double mean_sum_d2d_rate = 0.0;
  double mean_sum_cue_rate = 0.0;
  double mean_total_reward = 0.0;
};

// Seed-averaged summary over successful runs, grouped by (algorithm, N,
// lambda) in first-seen order.
inline std::vector<SummaryRecord> summarize(const std::vector<MetricsRecord>& records) {
  std::vector<SummaryRecord> out;
  auto find = [&](const MetricsRecord& r) -> SummaryRecord* {
    for (auto& s : out)
      if (s.algorithm == r.algorithm && s.n_d2d == r.n_d2d && s.lambda == r.lambda) return &s;
    return nullptr;
  };
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    SummaryRecord* s = find(r);
    if (!s) {
      out.push_back(SummaryRecord{r.algorithm, r.n_d2d, r.lambda, 0, r.train_slots, r.eval_slots,
                                  0.0, 0.0, 0.0, 0.0, 0.0});
      s = &out.back();
    }
    s->n_seeds += 1;
    s->cue_outage_prob += r.cue_outage_prob;
    s->d2d_outage_prob += r.d2d_outage_prob;
    s->mean_sum_d2d_rate += r.mean_sum_d2d_rate;
    s->mean_sum_cue_rate += r.mean_sum_cue_rate;
    s->mean_total_reward += r.mean_total_reward;
  }
  for (auto& s : out) {
    s.cue_outage_prob /= s.n_seeds;
    s.d2d_outage_prob /= s.n_seeds;
    s.mean_sum_d2d_rate /= s.n_seeds;
    s.mean_sum_cue_rate /= s.n_seeds;
    s.mean_total_reward /= s.n_seeds;
  }
  return out;
}

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRecord>& records,
                              const std::string& cfg_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "# schema=" << kSummarySchema << " config=" << cfg_hash << "\n";
  os << "algorithm,n_d2d,lambda,n_seeds,train_slots,eval_slots,cue_outage_prob,d2d_outage_prob,"
        "mean_sum_d2d_rate,mean_sum_cue_rate,mean_total_reward\n";
  for (const auto& r : records) {
    os << r.algorithm << ',' << r.n_d2d << ',' << r.lambda << ',' << r.n_seeds << ','
       << r.train_slots << ',' << r.eval_slots << ',' << g17(r.cue_outage_prob) << ','
       << g17(r.d2d_outage_prob) << ',' << g17(r.mean_sum_d2d_rate) << ','
       << g17(r.mean_sum_cue_rate) << ',' << g17(r.mean_total_reward) << "\n";
  }
}

inline void write_training_log(const std::string& path, const std::vector<TrainLogRow>& log,
                               int n_agents, const std::string& cfg_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "# schema=" << kTrainlogSchema << " config=" << cfg_hash << "\n";
  os << "slot,total_reward";
  for (int i = 0; i < n_agents; ++i) os << ",reward_" << i;
  os << ",critic_loss_mean,actor_objective_mean,cue_outage_count,d2d_outage_count,sum_d2d_rate\n";
  for (const auto& row : log) {
    os << row.slot << ',' << g17(row.total_reward);
    for (double r : row.agent_rewards) os << ',' << g17(r);
    os << ',' << g17(row.critic_loss_mean) << ',' << g17(row.actor_objective_mean) << ','
       << row.cue_outage_count << ',' << row.d2d_outage_count << ',' << g17(row.sum_d2d_rate)
       << "\n";
  }
}

// Trailing moving average: out[t] = mean(v[max(0, t-w+1) .. t]).
inline std::vector<double> moving_average(const std::vector<double>& v, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window >= 1");
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    acc += v[t];
    if (t >= static_cast<std::size_t>(window)) acc -= v[t - window];
    const std::size_t count = std::min<std::size_t>(t + 1, window);
    out[t] = acc / static_cast<double>(count);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV reading (own schemas only)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

struct CsvTable {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("CSV column not found: " + name);
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open CSV: " + path);
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("schema=");
      if (pos != std::string::npos) {
        t.schema = line.substr(pos + 7);
        const auto sp = t.schema.find(' ');
        if (sp != std::string::npos) t.schema = t.schema.substr(0, sp);
      }
      continue;
    }
    if (!have_header) {
      t.header = split_csv_line(line);
      have_header = true;
    } else {
      t.rows.push_back(split_csv_line(line));
    }
  }
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// reward-curve: moving average of the training log's total reward
// ---------------------------------------------------------------------------

inline void reward_curve(const std::string& log_path, int window, const std::string& out_path) {
  const auto table = detail::read_csv(log_path);
  if (table.schema != kTrainlogSchema)
    throw std::invalid_argument("reward-curve expects a " + std::string(kTrainlogSchema) +
                                " file, got '" + table.schema + "'");
  const int slot_col = table.column("slot");
  const int reward_col = table.column("total_reward");
  std::vector<double> rewards;
  std::vector<std::string> slots;
  rewards.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    slots.push_back(row[slot_col]);
    rewards.push_back(std::stod(row[reward_col]));
  }
  const auto ma = moving_average(rewards, window);
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + out_path);
  os << "# schema=" << kCurveSchema << " window=" << window << "\n";
  os << "slot,total_reward_ma\n";
  for (std::size_t i = 0; i < ma.size(); ++i) os << slots[i] << ',' << g17(ma[i]) << "\n";
}

// ---------------------------------------------------------------------------
// compare: join summary CSVs by sweep point and rank algorithms per metric
// ---------------------------------------------------------------------------

struct CompareRow {
  int sweep_value = 0;
  std::string algorithm;
  int lambda = -1;
  int n_seeds = 0;
  double cue_outage_prob = 0.0;
  double d2d_outage_prob = 0.0;
  double mean_sum_d2d_rate = 0.0;
  double mean_sum_cue_rate = 0.0;
  double mean_total_reward = 0.0;
  int rank_cue_outage = 0;   // 1 = lowest outage
  int rank_d2d_sum_rate = 0; // 1 = highest sum rate
  std::string status = "ok"; // "ok" or "missing"
};

// The sweep axis is inferred: if every row shares one N and lambda varies,
// the axis is lambda; otherwise it is N.
inline std::vector<CompareRow> compare_summaries(const std::vector<std::string>& paths,
                                                 std::string* axis_name_out = nullptr) {
  struct Entry {
    std::string file_label;
    SummaryRecord rec;
  };
  std::vector<Entry> entries;
  for (const auto& path : paths) {
    const auto table = detail::read_csv(path);
    if (table.schema != kSummarySchema)
      throw std::invalid_argument("compare expects " + std::string(kSummarySchema) + " files, " +
                                  path + " has '" + table.schema + "'");
    const int c_algo = table.column("algorithm");
    const int c_n = table.column("n_d2d");
    const int c_lambda = table.column("lambda");
    const int c_seeds = table.column("n_seeds");
    const int c_cue = table.column("cue_outage_prob");
    const int c_d2d = table.column("d2d_outage_prob");
    const int c_rate = table.column("mean_sum_d2d_rate");
    const int c_crate = table.column("mean_sum_cue_rate");
    const int c_rew = table.column("mean_total_reward");
    for (const auto& row : table.rows) {
      SummaryRecord r;
      r.algorithm = row[c_algo];
      r.n_d2d = std::stoi(row[c_n]);
      r.lambda = std::stoi(row[c_lambda]);
      r.n_seeds = std::stoi(row[c_seeds]);
      r.cue_outage_prob = std::stod(row[c_cue]);
      r.d2d_outage_prob = std::stod(row[c_d2d]);
      r.mean_sum_d2d_rate = std::stod(row[c_rate]);
      r.mean_sum_cue_rate = std::stod(row[c_crate]);
      r.mean_total_reward = std::stod(row[c_rew]);
      entries.push_back({path + ":" + r.algorithm + ":lam" + row[c_lambda], r});
    }
  }
  if (entries.empty()) throw std::invalid_argument("compare: no rows in inputs");

  bool same_n = true;
  bool lambda_varies = false;
  for (const auto& e : entries) {
    if (e.rec.n_d2d != entries.front().rec.n_d2d) same_n = false;
    if (e.rec.lambda != entries.front().rec.lambda) lambda_varies = true;
  }
  const bool axis_lambda = same_n && lambda_varies;
  if (axis_name_out) *axis_name_out = axis_lambda ? "lambda" : "num_d2d";
  auto key_of = [&](const SummaryRecord& r) { return axis_lambda ? r.lambda : r.n_d2d; };

  // Union of sweep keys (ascending) and of series labels (first-seen order).
  std::vector<int> keys;
  std::vector<std::string> labels;
  for (const auto& e : entries) {
    if (std::find(keys.begin(), keys.end(), key_of(e.rec)) == keys.end())
      keys.push_back(key_of(e.rec));
    const std::string label = axis_lambda ? e.rec.algorithm
                                          : e.rec.algorithm + "/" + std::to_string(e.rec.lambda);
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  }
  std::sort(keys.begin(), keys.end());

  std::vector<CompareRow> rows;
  for (int key : keys) {
    std::vector<CompareRow> group;
    for (const auto& label : labels) {
      const Entry* found = nullptr;
      for (const auto& e : entries) {
        const std::string l = axis_lambda ? e.rec.algorithm
                                          : e.rec.algorithm + "/" + std::to_string(e.rec.lambda);
        if (l == label && key_of(e.rec) == key) {
          found = &e;
          break;
        }
      }
      CompareRow row;
      row.sweep_value = key;
      if (found) {
        row.algorithm = found->rec.algorithm;
        row.lambda = found->rec.lambda;
        row.n_seeds = found->rec.n_seeds;
        row.cue_outage_prob = found->rec.cue_outage_prob;
        row.d2d_outage_prob = found->rec.d2d_outage_prob;
        row.mean_sum_d2d_rate = found->rec.mean_sum_d2d_rate;
        row.mean_sum_cue_rate = found->rec.mean_sum_cue_rate;
        row.mean_total_reward = found->rec.mean_total_reward;
      } else {
        const auto slash = label.find('/');
        row.algorithm = slash == std::string::npos ? label : label.substr(0, slash);
        row.status = "missing";  // flagged, never dropped silently
        row.cue_outage_prob = row.d2d_outage_prob = row.mean_sum_d2d_rate =
            row.mean_sum_cue_rate = row.mean_total_reward =
                std::numeric_limits<double>::quiet_NaN();
      }
      group.push_back(row);
    }
    // Rank present rows: outage ascending, sum rate descending.
    std::vector<int> present;
    for (std::size_t i = 0; i < group.size(); ++i)
      if (group[i].status == "ok") present.push_back(static_cast<int>(i));
    auto rank_by = [&](auto cmp, auto assign) {
      std::vector<int> order = present;
      std::sort(order.begin(), order.end(), cmp);
      for (std::size_t r = 0; r < order.size(); ++r) assign(group[order[r]], static_cast<int>(r + 1));
    };
    rank_by([&](int a, int b) { return group[a].cue_outage_prob < group[b].cue_outage_prob; },
            [](CompareRow& r, int rank) { r.rank_cue_outage = rank; });
    rank_by([&](int a, int b) { return group[a].mean_sum_d2d_rate > group[b].mean_sum_d2d_rate; },
            [](CompareRow& r, int rank) { r.rank_d2d_sum_rate = rank; });
    rows.insert(rows.end(), group.begin(), group.end());
  }
  return rows;
}

inline void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows,
                              const std::string& axis_name) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "# schema=" << kCompareSchema << " axis=" << axis_name << "\n";
  os << "sweep_value,algorithm,lambda,n_seeds,cue_outage_prob,d2d_outage_prob,mean_sum_d2d_rate,"
        "mean_sum_cue_rate,mean_total_reward,rank_cue_outage,rank_d2d_sum_rate,status\n";
  for (const auto& r : rows) {
    os << r.sweep_value << ',' << r.algorithm << ',' << r.lambda << ',' << r.n_seeds << ','
       << g17(r.cue_outage_prob) << ',' << g17(r.d2d_outage_prob) << ','
       << g17(r.mean_sum_d2d_rate) << ',' << g17(r.mean_sum_cue_rate) << ','
       << g17(r.mean_total_reward) << ',' << r.rank_cue_outage << ',' << r.rank_d2d_sum_rate << ','
       << r.status << "\n";
  }
}

// ---------------------------------------------------------------------------
// Run pipeline
// ---------------------------------------------------------------------------

struct RunResult {
  std::vector<MetricsRecord> records;
  bool any_fault = false;
  std::string output_dir;
  std::string cfg_hash;
};

namespace detail {

inline std::string run_tag(const ExperimentConfig& cfg, Algorithm algo, int n, int lambda,
                           std::uint64_t seed) {
  (void)cfg;
  std::string tag = to_string(algo) + "_n" + std::to_string(n);
  if (algo == Algorithm::kNaac) tag += "_lam" + std::to_string(lambda);
  tag += "_seed" + std::to_string(seed);
  return tag;
}

}  // namespace detail

// Executes one (algorithm, sweep value, seed) job: fresh environment, train
// where applicable, then evaluate the frozen policy.
inline MetricsRecord run_single(const ExperimentConfig& cfg, int sweep_value, std::uint64_t seed,
                                const std::string& out_dir, const std::string& cfg_hash) {
  ExperimentConfig local = cfg;
  if (cfg.sweep == SweepAxis::kNumD2d) local.env.cell.num_d2d = sweep_value;
  if (cfg.sweep == SweepAxis::kLambda) local.trainer.lambda = sweep_value;
  local.validate();

  const Algorithm algo = local.algorithm;
  const int n = local.env.cell.num_d2d;
  const int lambda = algo == Algorithm::kNaac ? local.trainer.lambda
                     : algo == Algorithm::kIndependentAc ? 0
                                                         : -1;
  MetricsRecord rec;
  rec.algorithm = to_string(algo);
  rec.n_d2d = n;
  rec.lambda = lambda;
  rec.seed = seed;
  rec.train_slots = algo == Algorithm::kRandom ? 0 : local.train_slots;
  rec.eval_slots = local.eval_slots;

  const std::string tag = detail::run_tag(local, algo, n, lambda, seed);
  Env env(local.env, seed);
  ExecutionMetrics metrics;
  try {
    switch (algo) {
      case Algorithm::kMaac:
      case Algorithm::kNaac: {
        TrainerConfig tcfg = local.trainer;
        tcfg.mode = algo == Algorithm::kMaac ? CriticMode::kMaac : CriticMode::kNaac;
        tcfg.fault_dump_path = out_dir + "/fault_" + tag + ".txt";
        auto result = train_marl(env, tcfg, seed, local.train_slots);
        write_training_log(out_dir + "/trainlog_" + tag + ".csv", result.log, n, cfg_hash);
        const std::string wdir = out_dir + "/weights_" + tag;
        std::filesystem::create_directories(wdir);
        for (int i = 0; i < n; ++i)
          save_net(result.actors[i], wdir + "/actor_" + std::to_string(i) + ".mlpw");
        metrics = execute(env, result.actors, local.eval_slots);
        break;
      }
      case Algorithm::kIndependentAc: {
        TrainerConfig tcfg = local.trainer;
        tcfg.fault_dump_path = out_dir + "/fault_" + tag + ".txt";
        auto result = train_independent_ac(env, tcfg, seed, local.train_slots);
        write_training_log(out_dir + "/trainlog_" + tag + ".csv", result.log, n, cfg_hash);
        const std::string wdir = out_dir + "/weights_" + tag;
        std::filesystem::create_directories(wdir);
        for (int i = 0; i < n; ++i)
          save_net(result.actors[i], wdir + "/actor_" + std::to_string(i) + ".mlpw");
        metrics = execute(env, result.actors, local.eval_slots);
        break;
      }
      case Algorithm::kQLearning: {
        auto result = train_q_learning(env, local.ql, seed, local.train_slots);
        write_training_log(out_dir + "/trainlog_" + tag + ".csv", result.log, n, cfg_hash);
        metrics = execute_q_tables(env, result.tables, local.eval_slots);
        break;
      }
      case Algorithm::kDqn: {
        auto result = train_dqn(env, local.dqn, seed, local.train_slots);
        write_training_log(out_dir + "/trainlog_" + tag + ".csv", result.log, n, cfg_hash);
        const std::string wdir = out_dir + "/weights_" + tag;
        std::filesystem::create_directories(wdir);
        for (int i = 0; i < n; ++i)
          save_net(result.nets[i], wdir + "/qnet_" + std::to_string(i) + ".mlpw");
        metrics = execute(env, result.nets, local.eval_slots);
        break;
      }
      case Algorithm::kSla: {
        auto result = train_sla(env, local.sla, seed, local.train_slots);
        write_training_log(out_dir + "/trainlog_" + tag + ".csv", result.log, n, cfg_hash);
        metrics = execute_sla(env, result.automata, local.eval_slots);
        break;
      }
      case Algorithm::kRandom: {
        metrics = random_allocator(env, local.eval_slots, seed);
        break;
      }
    }
  } catch (const TrainingFault&) {
    rec.status = "fault";
    return rec;
  }
  rec.cue_outage_prob = metrics.cue_outage_probability();
  rec.d2d_outage_prob = metrics.d2d_outage_probability();
  rec.mean_sum_d2d_rate = metrics.mean_sum_d2d_rate();
  rec.mean_sum_cue_rate = metrics.mean_sum_cue_rate();
  rec.mean_total_reward = metrics.mean_total_reward();
  return rec;
}

// Full pipeline: sweep values x seeds, detail + seed-averaged summary CSVs.
// Training faults mark their row and the overall result; other runs proceed.
inline RunResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.output_dir = resolve_output_dir(cfg);
  result.cfg_hash = config_hash(cfg);
  std::filesystem::create_directories(result.output_dir);
  {
    std::ofstream os(result.output_dir + "/resolved_config.json", std::ios::binary);
    os << to_json(cfg).dump(2) << "\n";
  }
  for (int v : cfg.resolved_sweep_values()) {
    for (std::uint64_t seed : cfg.seeds) {
      MetricsRecord rec = run_single(cfg, v, seed, result.output_dir, result.cfg_hash);
      if (rec.status != "ok") result.any_fault = true;
      result.records.push_back(std::move(rec));
    }
  }
  write_metrics_csv(result.output_dir + "/metrics.csv", result.records, result.cfg_hash);
  write_summary_csv(result.output_dir + "/summary.csv", summarize(result.records),
                    result.cfg_hash);
  return result;
}

}  // namespace d2dmarl
