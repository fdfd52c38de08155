// Command-line harness for the D2D spectrum-allocation experiments.
// Subcommands: train, execute, sweep, compare, prop1, reward-curve.
// Exit codes: 0 success, 1 configuration error, 2 run failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2dmarl/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string algo;
  std::string seeds_csv;
  std::string out;
  std::int64_t train_slots = -1;
  std::int64_t eval_slots = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file (defaults used when omitted)");
  cmd->add_option("-a,--algo", o.algo, "algorithm: maac|naac|ql|dqn|ac|sla|random");
  cmd->add_option("-s,--seeds", o.seeds_csv, "comma-separated seed list, e.g. 1,2,3");
  cmd->add_option("-o,--out", o.out, "output directory (env D2DMARL_OUTPUT_DIR overrides)");
  cmd->add_option("--train-slots", o.train_slots, "training slots including warmup");
  cmd->add_option("--eval-slots", o.eval_slots, "evaluation slots with frozen policy");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stoi(item));
  }
  return values;
}

d2dmarl::ExperimentConfig make_config(const CommonOpts& o) {
  d2dmarl::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = d2dmarl::load_config(o.config_path);
  if (!o.algo.empty()) cfg.algorithm = d2dmarl::parse_algorithm(o.algo);
  if (!o.seeds_csv.empty()) cfg.seeds = parse_seed_list(o.seeds_csv);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.train_slots >= 0) cfg.train_slots = o.train_slots;
  if (o.eval_slots >= 0) cfg.eval_slots = o.eval_slots;
  return cfg;
}

int finish_run(const d2dmarl::RunResult& result) {
  for (const auto& r : result.records) {
    std::cout << r.algorithm << " n=" << r.n_d2d << " lambda=" << r.lambda << " seed=" << r.seed
              << " status=" << r.status;
    if (r.status == "ok")
      std::cout << " cue_outage=" << d2dmarl::g17(r.cue_outage_prob)
                << " d2d_outage=" << d2dmarl::g17(r.d2d_outage_prob)
                << " sum_d2d_rate=" << d2dmarl::g17(r.mean_sum_d2d_rate)
                << " mean_reward=" << d2dmarl::g17(r.mean_total_reward);
    std::cout << "\n";
  }
  std::cout << "wrote " << result.output_dir << "/metrics.csv and summary.csv (config "
            << result.cfg_hash << ")\n";
  return result.any_fault ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-cell D2D underlay spectrum allocation: multi-agent RL experiments"};
  app.require_subcommand(1);

  CommonOpts train_opts;
  auto* train_cmd = app.add_subcommand("train", "train one algorithm and evaluate it");
  add_common(train_cmd, train_opts);

  CommonOpts sweep_opts;
  std::string sweep_axis = "num_d2d";
  std::string sweep_values_csv;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep num_d2d or lambda across seeds");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", sweep_axis, "sweep axis: num_d2d|lambda");
  sweep_cmd->add_option("--values", sweep_values_csv, "comma-separated sweep values");

  CommonOpts exec_opts;
  std::string weights_dir;
  std::string weight_prefix = "actor";
  std::uint64_t exec_seed = 1;
  std::int64_t exec_slots = -1;
  auto* exec_cmd = app.add_subcommand("execute", "run saved actor weights, decentralized");
  exec_cmd->add_option("-c,--config", exec_opts.config_path, "JSON config file");
  exec_cmd->add_option("-a,--algo", exec_opts.algo, "label recorded in metrics (default maac)");
  exec_cmd->add_option("-w,--weights", weights_dir, "directory with <prefix>_<i>.mlpw files")
      ->required();
  exec_cmd->add_option("--prefix", weight_prefix, "weight file prefix (actor|qnet)");
  exec_cmd->add_option("--seed", exec_seed, "environment seed");
  exec_cmd->add_option("--slots", exec_slots, "evaluation slots");
  exec_cmd->add_option("-o,--out", exec_opts.out, "output directory");

  std::vector<std::string> compare_inputs;
  std::string compare_out = "comparison.csv";
  auto* compare_cmd = app.add_subcommand("compare", "join summary CSVs and rank algorithms");
  compare_cmd->add_option("inputs", compare_inputs, "summary CSV files")->required();
  compare_cmd->add_option("-o,--out", compare_out, "comparison CSV path");

  std::string prop1_agents = "2,3,4";
  std::int64_t prop1_samples = 100000;
  std::uint64_t prop1_seed = 1;
  std::string prop1_out;
  auto* prop1_cmd =
      app.add_subcommand("prop1", "policy-gradient alignment probability vs agent count");
  prop1_cmd->add_option("--agents", prop1_agents, "comma-separated agent counts");
  prop1_cmd->add_option("--samples", prop1_samples, "Monte Carlo samples per point");
  prop1_cmd->add_option("--seed", prop1_seed, "RNG seed");
  prop1_cmd->add_option("-o,--out", prop1_out, "optional CSV output path");

  std::string curve_log;
  int curve_window = 200;
  std::string curve_out = "reward_curve.csv";
  auto* curve_cmd = app.add_subcommand("reward-curve", "moving average of a training log");
  curve_cmd->add_option("--log", curve_log, "training log CSV")->required();
  curve_cmd->add_option("--window", curve_window, "moving-average window in slots");
  curve_cmd->add_option("-o,--out", curve_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) {
      auto cfg = make_config(train_opts);
      cfg.sweep = d2dmarl::SweepAxis::kNone;
      return finish_run(d2dmarl::run(cfg));
    }
    if (*sweep_cmd) {
      auto cfg = make_config(sweep_opts);
      cfg.sweep = d2dmarl::parse_sweep_axis(sweep_axis);
      if (!sweep_values_csv.empty()) cfg.sweep_values = parse_int_list(sweep_values_csv);
      return finish_run(d2dmarl::run(cfg));
    }
    if (*exec_cmd) {
      auto cfg = make_config(exec_opts);
      cfg.validate();
      const int n = cfg.env.cell.num_d2d;
      std::vector<d2dmarl::MLPNet> nets;
      for (int i = 0; i < n; ++i)
        nets.push_back(
            d2dmarl::load_net(weights_dir + "/" + weight_prefix + "_" + std::to_string(i) + ".mlpw"));
      d2dmarl::Env env(cfg.env, exec_seed);
      const std::int64_t slots = exec_slots > 0 ? exec_slots : cfg.eval_slots;
      const auto metrics = d2dmarl::execute(env, nets, slots);
      d2dmarl::MetricsRecord rec;
      rec.algorithm = exec_opts.algo.empty() ? "maac" : exec_opts.algo;
      rec.n_d2d = n;
      rec.seed = exec_seed;
      rec.eval_slots = slots;
      rec.cue_outage_prob = metrics.cue_outage_probability();
      rec.d2d_outage_prob = metrics.d2d_outage_probability();
      rec.mean_sum_d2d_rate = metrics.mean_sum_d2d_rate();
      rec.mean_sum_cue_rate = metrics.mean_sum_cue_rate();
      rec.mean_total_reward = metrics.mean_total_reward();
      const std::string out_dir = d2dmarl::resolve_output_dir(cfg);
      std::filesystem::create_directories(out_dir);
      d2dmarl::write_metrics_csv(out_dir + "/metrics.csv", {rec}, d2dmarl::config_hash(cfg));
      std::cout << "cue_outage=" << d2dmarl::g17(rec.cue_outage_prob)
                << " d2d_outage=" << d2dmarl::g17(rec.d2d_outage_prob)
                << " sum_d2d_rate=" << d2dmarl::g17(rec.mean_sum_d2d_rate)
                << " mean_reward=" << d2dmarl::g17(rec.mean_total_reward) << "\n";
      std::cout << "wrote " << out_dir << "/metrics.csv\n";
      return 0;
    }
    if (*compare_cmd) {
      std::string axis;
      const auto rows = d2dmarl::compare_summaries(compare_inputs, &axis);
      d2dmarl::write_compare_csv(compare_out, rows, axis);
      std::cout << "wrote " << compare_out << " (axis " << axis << ", " << rows.size()
                << " rows)\n";
      return 0;
    }
    if (*prop1_cmd) {
      const auto agents = parse_int_list(prop1_agents);
      if (agents.empty()) throw std::invalid_argument("prop1: empty agent list");
      std::ostringstream csv;
      csv << "# schema=prop1-v1 samples=" << prop1_samples << "\n";
      csv << "n_agents,samples,estimate,expected,rel_error\n";
      for (int n : agents) {
        const double est = d2dmarl::prop1_estimate(n, prop1_samples, prop1_seed);
        const double expected = std::pow(0.5, n);
        const double rel = std::abs(est - expected) / expected;
        csv << n << ',' << prop1_samples << ',' << d2dmarl::g17(est) << ','
            << d2dmarl::g17(expected) << ',' << d2dmarl::g17(rel) << "\n";
        std::cout << "N=" << n << " estimate=" << d2dmarl::g17(est)
                  << " expected=" << d2dmarl::g17(expected)
                  << " rel_error=" << d2dmarl::g17(rel) << "\n";
      }
      if (!prop1_out.empty()) {
        std::ofstream os(prop1_out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open for writing: " + prop1_out);
        os << csv.str();
        std::cout << "wrote " << prop1_out << "\n";
      }
      return 0;
    }
    if (*curve_cmd) {
      d2dmarl::reward_curve(curve_log, curve_window, curve_out);
      std::cout << "wrote " << curve_out << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
