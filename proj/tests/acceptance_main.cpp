// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if every
// selected criterion passes. Run all by default; --criteria 1,4,7 filters.
//
// Tolerances are pinned here, next to each criterion, so a change to any bar
// is visible in review rather than buried in a config file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "d2dmarl/experiment.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace d2dmarl;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances and scales
// ---------------------------------------------------------------------------

constexpr double kGradTol = 1e-4;          // criterion 1
constexpr int kGradSeeds = 20;             // criterion 1
constexpr double kGradBudgetSeconds = 60;  // criterion 1
constexpr double kSinrRelTol = 1e-12;      // criterion 2
constexpr int kSinrInstances = 1000;       // criterion 2
constexpr std::int64_t kRewardFuzzSteps = 10000;  // criterion 3
constexpr double kProp1RelTol = 0.15;      // criterion 4
constexpr std::int64_t kProp1Samples = 100000;  // criterion 4
constexpr std::int64_t kEquivSlots = 500;  // criterion 5
constexpr double kConvergenceFactor = 1.2; // criterion 6
constexpr int kConvergenceMinSeeds = 4;    // criterion 6: of 5
constexpr double kSeedBudgetSeconds = 600; // criterion 6
constexpr double kSoftUpdateRelTol = 1e-9; // criterion 8
constexpr std::int64_t kChi2Draws = 160000;  // criterion 9
constexpr int kDeskSeedCount = 5;          // criteria 6-7

// Desk-scale world: N = M = K = 4 in a compact cell so that every pair is a
// relevant interferer for every other pair (the neighborhood cutoff has to
// discard real information for the critic-scope comparison to be meaningful).
EnvConfig desk_env_config() {
  EnvConfig cfg;
  cfg.cell.num_d2d = 4;
  cfg.cell.num_cues = 4;
  cfg.cell.num_rbs = 4;
  cfg.cell.cell_radius_m = 100.0;
  cfg.cell.max_d2d_distance_m = 40.0;
  cfg.cell.p_bs_dbm = 30.0;
  cfg.cell.p_d2d_dbm = 13.0;
  return cfg;
}

TrainerConfig desk_trainer_config(CriticMode mode) {
  TrainerConfig cfg;
  cfg.mode = mode;
  cfg.lambda = 2;
  cfg.warmup_slots = 500;
  cfg.actor_hidden = {64, 32};
  cfg.critic_hidden = {128, 64, 32};
  return cfg;
}

constexpr std::int64_t kDeskTrainSlots = 5000;
constexpr std::int64_t kDeskEvalSlots = 2000;

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double l2_diff(const MLPNet& a, const MLPNet& b) {
  double acc = 0.0;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    for (std::size_t i = 0; i < a.weights[l].size(); ++i) {
      const double d = a.weights[l][i] - b.weights[l][i];
      acc += d * d;
    }
    for (std::size_t i = 0; i < a.biases[l].size(); ++i) {
      const double d = a.biases[l][i] - b.biases[l][i];
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

double l2_diff(const FusionCritic& a, const FusionCritic& b) {
  const double t = l2_diff(a.trunk, b.trunk);
  const double h = l2_diff(a.head, b.head);
  return std::sqrt(t * t + h * h);
}

bool same_params(const MLPNet& a, const MLPNet& b) {
  return a.weights == b.weights && a.biases == b.biases;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) return "<unreadable:" + p.string() + ">";
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct EnvVarGuard {
  std::string name;
  std::optional<std::string> saved;
  EnvVarGuard(const char* n, const std::string& value) : name(n) {
    if (const char* v = std::getenv(n)) saved = v;
    ::setenv(n, value.c_str(), 1);
  }
  ~EnvVarGuard() {
    if (saved)
      ::setenv(name.c_str(), saved->c_str(), 1);
    else
      ::unsetenv(name.c_str());
  }
};

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Criterion 1: gradient fidelity on every network shape in use
// ---------------------------------------------------------------------------

CriterionResult criterion_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;

  const std::vector<MLPSpec> actor_specs = {
      MLPSpec{{7, 64, 32, 4}},       // desk actor: 3+K inputs, K logits
      MLPSpec{{13, 512, 128, 10}},   // full-scale actor (default config shapes)
  };
  std::vector<FusionCriticSpec> critic_specs;
  critic_specs.push_back(FusionCriticSpec{28, 16, {128, 64, 32}});    // desk, full scope
  critic_specs.push_back(FusionCriticSpec{21, 12, {128, 64, 32}});    // desk, 2-neighbor scope
  critic_specs.push_back(FusionCriticSpec{130, 100, {1024, 512, 256}});  // full scale

  for (std::size_t cfg_i = 0; cfg_i < actor_specs.size(); ++cfg_i) {
    for (int s = 0; s < kGradSeeds; ++s) {
      MLPNet net = init_weights(actor_specs[cfg_i], rng::mix(0xACC0ULL, cfg_i, s));
      const auto r = gradcheck::check_mlp(net, rng::mix(0x5EEDULL, cfg_i, s), 120);
      worst = std::max(worst, r.max_rel_err);
      checked += r.checked;
      skipped += r.skipped;
    }
  }
  for (std::size_t cfg_i = 0; cfg_i < critic_specs.size(); ++cfg_i) {
    for (int s = 0; s < kGradSeeds; ++s) {
      FusionCritic critic = init_fusion_critic(critic_specs[cfg_i], rng::mix(0xACC1ULL, cfg_i, s));
      const auto rp = gradcheck::check_critic(critic, rng::mix(0x5EEEULL, cfg_i, s), 120);
      const auto ra =
          gradcheck::check_critic_action_input(critic, rng::mix(0x5EEFULL, cfg_i, s), 120);
      worst = std::max(worst, std::max(rp.max_rel_err, ra.max_rel_err));
      checked += rp.checked + ra.checked;
      skipped += rp.skipped + ra.skipped;
    }
  }
  const double elapsed = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "max rel err %.3g (tol %.0e), %zu probes (%zu near relu kinks skipped), "
                "%d seeds per shape, %.1f s (budget %.0f s)",
                worst, kGradTol, checked, skipped, kGradSeeds, elapsed, kGradBudgetSeconds);
  return {worst <= kGradTol && elapsed < kGradBudgetSeconds, buf};
}

// ---------------------------------------------------------------------------
// Criterion 2: SINR equivalence against naive reference formulas
// ---------------------------------------------------------------------------

CriterionResult criterion_sinr_oracle() {
  rng::SplitMix64 gen(0x51417ULL);
  double worst = 0.0;
  std::int64_t compared = 0;
  for (int inst = 0; inst < kSinrInstances; ++inst) {
    CellConfig cell;
    cell.num_d2d = 1 + static_cast<int>(gen.next_below(6));
    cell.num_cues = 1 + static_cast<int>(gen.next_below(6));
    cell.num_rbs = 1 + static_cast<int>(gen.next_below(4));
    cell.cell_radius_m = 100.0 + 400.0 * gen.next_unit();
    cell.max_d2d_distance_m = 10.0 + 40.0 * gen.next_unit();
    const CellTopology topo = place_users(cell, gen.next_u64());
    const ChannelRealization ch =
        realize_channel(topo, cell, gen.next_u64(), static_cast<std::int64_t>(gen.next_below(1000)));
    std::vector<int> alloc(cell.num_d2d);
    for (int& k : alloc) k = static_cast<int>(gen.next_below(cell.num_rbs));

    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    for (int m = 0; m < cell.num_cues; ++m) {
      const int k = topo.rb_of_cue[m];
      worst = std::max(worst, rel(cue_sinr(m, k, alloc, ch, cell),
                                  oracles::cue_sinr_naive(m, k, alloc, ch, cell)));
      ++compared;
    }
    for (int n = 0; n < cell.num_d2d; ++n) {
      worst = std::max(worst, rel(d2d_sinr(n, alloc[n], alloc, ch, cell),
                                  oracles::d2d_sinr_naive(n, alloc, ch, cell)));
      ++compared;
    }
  }
  char buf[192];
  std::snprintf(buf, sizeof buf, "%d instances, %lld link SINRs, max rel diff %.3g (tol %.0e)",
                kSinrInstances, static_cast<long long>(compared), worst, kSinrRelTol);
  return {worst <= kSinrRelTol, buf};
}

// ---------------------------------------------------------------------------
// Criterion 3: reward law under fuzzing
// ---------------------------------------------------------------------------

CriterionResult criterion_reward_law() {
  EnvConfig cfg;
  cfg.cell.num_d2d = 5;
  cfg.cell.num_cues = 3;
  cfg.cell.num_rbs = 3;
  cfg.cell.cell_radius_m = 150.0;   // crowded cell so both reward branches occur
  cfg.cell.max_d2d_distance_m = 60.0;
  Env env(cfg, 0xF0022ULL);
  rng::SplitMix64 gen(0xF0023ULL);
  const double thr = cfg.cell.cue_sinr_threshold_linear();
  std::int64_t negatives = 0;
  std::int64_t positives = 0;
  for (std::int64_t t = 0; t < kRewardFuzzSteps; ++t) {
    std::vector<int> joint(5);
    for (int& k : joint) k = static_cast<int>(gen.next_below(3));
    const StepOutcome out = env.step(joint);
    for (int i = 0; i < 5; ++i) {
      const bool cue_violated = out.cue_sinrs[joint[i]] < thr;  // M == K: CUE m sits on RB m
      if (cue_violated) {
        if (out.rewards[i] != -1.0) return {false, "violated slot did not yield exactly -1"};
        ++negatives;
      } else {
        if (out.rewards[i] != std::log2(1.0 + out.d2d_sinrs[i]))
          return {false, "served slot reward differs from log2(1 + own SINR)"};
        if (!(out.rewards[i] > 0.0)) return {false, "served slot reward was not positive"};
        ++positives;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%lld steps, %lld positive and %lld sentinel rewards, both laws exact",
                static_cast<long long>(kRewardFuzzSteps), static_cast<long long>(positives),
                static_cast<long long>(negatives));
  return {positives > 0 && negatives > 0, buf};
}

// ---------------------------------------------------------------------------
// Criterion 4: alignment-probability estimate vs (0.5)^N
// ---------------------------------------------------------------------------

CriterionResult criterion_alignment() {
  std::string detail;
  bool ok = true;
  for (int n : {2, 3, 4}) {
    const double est = prop1_estimate(n, kProp1Samples, 2026);
    const double expected = std::pow(0.5, n);
    const double rel = std::abs(est - expected) / expected;
    char buf[96];
    std::snprintf(buf, sizeof buf, "N=%d est %.5f vs %.5f (rel %.3f); ", n, est, expected, rel);
    detail += buf;
    ok = ok && rel <= kProp1RelTol;
  }
  detail += "tol 15% per point";
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// Criterion 5: neighborhood scope N-1 reproduces the full-scope run bitwise
// ---------------------------------------------------------------------------

CriterionResult criterion_scope_equivalence() {
  const EnvConfig ecfg = desk_env_config();
  TrainerConfig full = desk_trainer_config(CriticMode::kMaac);
  TrainerConfig widest = desk_trainer_config(CriticMode::kNaac);
  full.warmup_slots = 100;  // below the slot budget so updates actually run
  widest.warmup_slots = 100;
  full.lambda = 3;
  widest.lambda = 3;  // N-1 neighbors: identical critic scope by construction

  Env env_a(ecfg, 12);
  MarlTrainer trainer_a(env_a, full, 12);
  const auto log_a = trainer_a.train(env_a, kEquivSlots);
  Env env_b(ecfg, 12);
  MarlTrainer trainer_b(env_b, widest, 12);
  const auto log_b = trainer_b.train(env_b, kEquivSlots);

  bool same = true;
  for (int i = 0; i < 4; ++i) {
    same = same && same_params(trainer_a.actors()[i], trainer_b.actors()[i]);
    same = same && same_params(trainer_a.target_actors()[i], trainer_b.target_actors()[i]);
    same = same && same_params(trainer_a.critics()[i].trunk, trainer_b.critics()[i].trunk);
    same = same && same_params(trainer_a.critics()[i].head, trainer_b.critics()[i].head);
    same = same &&
           same_params(trainer_a.target_critics()[i].trunk, trainer_b.target_critics()[i].trunk);
    same = same &&
           same_params(trainer_a.target_critics()[i].head, trainer_b.target_critics()[i].head);
  }
  std::int64_t update_slots = 0;
  for (std::size_t t = 0; t < log_a.size(); ++t) {
    same = same && log_a[t].total_reward == log_b[t].total_reward;
    const bool fa = std::isfinite(log_a[t].critic_loss_mean);
    const bool fb = std::isfinite(log_b[t].critic_loss_mean);
    same = same && fa == fb && (!fa || log_a[t].critic_loss_mean == log_b[t].critic_loss_mean);
    if (fa) ++update_slots;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "N=4, %lld slots (%lld with updates): weights and loss traces %s",
                static_cast<long long>(kEquivSlots), static_cast<long long>(update_slots),
                same ? "bitwise identical" : "DIFFER");
  return {same && update_slots > 0, buf};
}

// ---------------------------------------------------------------------------
// Desk study shared by criteria 6 and 7
// ---------------------------------------------------------------------------

struct DeskSeedRow {
  std::uint64_t seed = 0;
  double ma200 = 0.0;          // trained policy, trailing 200-slot mean reward
  double random_mean = 0.0;    // random allocator mean reward over the same span
  double train_seconds = 0.0;
  ExecutionMetrics full_eval;    // full-scope critic, frozen policy
  ExecutionMetrics neighbor_eval;  // 2-neighbor critic, frozen policy
  ExecutionMetrics random_eval;
};

const std::vector<DeskSeedRow>& desk_study() {
  static std::vector<DeskSeedRow> rows = [] {
    std::vector<DeskSeedRow> out;
    const EnvConfig ecfg = desk_env_config();
    for (std::uint64_t seed = 1; seed <= kDeskSeedCount; ++seed) {
      DeskSeedRow row;
      row.seed = seed;

      const auto t0 = std::chrono::steady_clock::now();
      Env env(ecfg, seed);
      const TrainResult trained =
          train_marl(env, desk_trainer_config(CriticMode::kMaac), seed, kDeskTrainSlots);
      row.train_seconds = seconds_since(t0);
      for (std::int64_t t = kDeskTrainSlots - 200; t < kDeskTrainSlots; ++t)
        row.ma200 += trained.log[t].total_reward;
      row.ma200 /= 200.0;
      row.full_eval = execute(env, trained.actors, kDeskEvalSlots);

      Env nenv(ecfg, seed);
      const TrainResult neighbor =
          train_marl(nenv, desk_trainer_config(CriticMode::kNaac), seed, kDeskTrainSlots);
      row.neighbor_eval = execute(nenv, neighbor.actors, kDeskEvalSlots);

      Env renv(ecfg, seed);
      row.random_mean = random_allocator(renv, kDeskTrainSlots, seed).mean_total_reward();
      Env renv2(ecfg, seed);
      row.random_eval = random_allocator(renv2, kDeskEvalSlots, seed + 1000);

      std::printf("    seed %llu: ma200 %.3f random %.3f (x%.2f) | eval outage full %.4f "
                  "2-neighbor %.4f random %.4f | train %.0f s\n",
                  static_cast<unsigned long long>(seed), row.ma200, row.random_mean,
                  row.ma200 / row.random_mean, row.full_eval.cue_outage_probability(),
                  row.neighbor_eval.cue_outage_probability(),
                  row.random_eval.cue_outage_probability(), row.train_seconds);
      std::fflush(stdout);
      out.push_back(row);
    }
    return out;
  }();
  return rows;
}

// ---------------------------------------------------------------------------
// Criterion 6: desk-scale convergence beats the random mean by >= 20%
// ---------------------------------------------------------------------------

CriterionResult criterion_convergence() {
  const auto& rows = desk_study();
  int passing = 0;
  double slowest = 0.0;
  for (const auto& row : rows) {
    if (row.ma200 >= kConvergenceFactor * row.random_mean) ++passing;
    slowest = std::max(slowest, row.train_seconds);
  }
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "%d of %d seeds reach %.1fx the random mean (need >= %d); slowest seed %.0f s "
                "(budget %.0f s)",
                passing, kDeskSeedCount, kConvergenceFactor, kConvergenceMinSeeds, slowest,
                kSeedBudgetSeconds);
  return {passing >= kConvergenceMinSeeds && slowest <= kSeedBudgetSeconds, buf};
}

// ---------------------------------------------------------------------------
// Criterion 7: outage and sum-rate ordering, seed-averaged
// ---------------------------------------------------------------------------

CriterionResult criterion_ordering() {
  const auto& rows = desk_study();
  double full_outage = 0.0, neighbor_outage = 0.0, random_outage = 0.0;
  double full_rate = 0.0, neighbor_rate = 0.0, random_rate = 0.0;
  for (const auto& row : rows) {
    full_outage += row.full_eval.cue_outage_probability();
    neighbor_outage += row.neighbor_eval.cue_outage_probability();
    random_outage += row.random_eval.cue_outage_probability();
    full_rate += row.full_eval.mean_sum_d2d_rate();
    neighbor_rate += row.neighbor_eval.mean_sum_d2d_rate();
    random_rate += row.random_eval.mean_sum_d2d_rate();
  }
  const double n = static_cast<double>(rows.size());
  full_outage /= n;
  neighbor_outage /= n;
  random_outage /= n;
  full_rate /= n;
  neighbor_rate /= n;
  random_rate /= n;

  const bool outage_ok = full_outage <= neighbor_outage && neighbor_outage <= random_outage;
  const bool rate_ok = full_rate >= random_rate && neighbor_rate >= random_rate;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "outage full %.5f <= 2-neighbor %.5f <= random %.5f: %s | sum rate full %.3f, "
                "2-neighbor %.3f vs random %.3f: %s (%d seeds)",
                full_outage, neighbor_outage, random_outage, outage_ok ? "yes" : "NO", full_rate,
                neighbor_rate, random_rate, rate_ok ? "yes" : "NO", kDeskSeedCount);
  return {outage_ok && rate_ok, buf};
}

// ---------------------------------------------------------------------------
// Criterion 8: geometric decay of the target-network gap
// ---------------------------------------------------------------------------

CriterionResult criterion_soft_update() {
  const double tau = 0.01;
  double worst = 0.0;

  MLPNet online = init_weights(MLPSpec{{6, 16, 8, 3}}, 11);
  MLPNet target = init_weights(MLPSpec{{6, 16, 8, 3}}, 22);
  const double net0 = l2_diff(target, online);
  int k = 0;
  for (int checkpoint : {100, 500}) {
    for (; k < checkpoint; ++k) soft_update(target, online, tau);
    const double expect = std::pow(1.0 - tau, k) * net0;
    worst = std::max(worst, std::abs(l2_diff(target, online) - expect) / expect);
  }

  const FusionCriticSpec cspec{10, 6, {16, 8}};
  FusionCritic conline = init_fusion_critic(cspec, 1);
  FusionCritic ctarget = init_fusion_critic(cspec, 2);
  const double critic0 = l2_diff(ctarget, conline);
  k = 0;
  for (int checkpoint : {100, 500}) {
    for (; k < checkpoint; ++k) soft_update(ctarget, conline, tau);
    const double expect = std::pow(1.0 - tau, k) * critic0;
    worst = std::max(worst, std::abs(l2_diff(ctarget, conline) - expect) / expect);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "gap norm vs (1-tau)^k law at k=100,500: max rel dev %.3g (tol %.0e)", worst,
                kSoftUpdateRelTol);
  return {worst <= kSoftUpdateRelTol, buf};
}

// ---------------------------------------------------------------------------
// Criterion 9: replay buffer FIFO property + uniform sampling
// ---------------------------------------------------------------------------

CriterionResult criterion_replay() {
  const std::size_t capacity = 16;
  ReplayBuffer buffer(capacity);
  std::vector<double> reference;  // tag of each live transition, oldest first
  rng::SplitMix64 gen(0xB0FFE2ULL);
  for (int push = 0; push < 200; ++push) {
    const double tag = static_cast<double>(push);
    Transition tr;
    tr.states = {{tag}};
    tr.actions = {{tag}};
    tr.rewards = {tag};
    tr.next_states = {{tag + 0.5}};
    buffer.push(tr);
    reference.push_back(tag);
    if (reference.size() > capacity) reference.erase(reference.begin());
    if (buffer.size() != reference.size()) return {false, "size diverged from reference model"};
    for (std::size_t i = 0; i < reference.size(); ++i)
      if (buffer.at(i).rewards[0] != reference[i])
        return {false, "contents diverged from the last min(capacity, pushes) transitions"};
  }

  std::vector<std::int64_t> counts(capacity, 0);
  std::int64_t drawn = 0;
  while (drawn < kChi2Draws) {
    const auto indices = buffer.sample_indices(capacity, gen);
    if (!indices) return {false, "sampling refused on a full buffer"};
    for (std::size_t idx : *indices) {
      // live tags are 184..199 after 200 pushes into 16 cells
      ++counts[static_cast<std::size_t>(buffer.at(idx).rewards[0]) - 184];
      ++drawn;
    }
  }
  const double stat =
      oracles::chi2_statistic(counts, static_cast<double>(drawn) / static_cast<double>(capacity));
  const double critical = oracles::chi2_critical_99(static_cast<int>(capacity) - 1);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "FIFO property over 200 pushes exact; chi^2 %.2f < %.2f at alpha 0.01 "
                "(%lld draws, 16 cells)",
                stat, critical, static_cast<long long>(drawn));
  return {stat < critical, buf};
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical rerun of the full pipeline
// ---------------------------------------------------------------------------

CriterionResult criterion_determinism() {
  ExperimentConfig cfg;
  cfg.env.cell.num_d2d = 2;
  cfg.env.cell.num_cues = 2;
  cfg.env.cell.num_rbs = 2;
  cfg.algorithm = Algorithm::kMaac;
  cfg.train_slots = 300;
  cfg.eval_slots = 200;
  cfg.seeds = {1, 2};
  cfg.trainer.warmup_slots = 100;
  cfg.trainer.batch_size = 32;
  cfg.trainer.actor_hidden = {16};
  cfg.trainer.critic_hidden = {32, 16};
  cfg.trainer.buffer_capacity = 4096;
  cfg.output_dir = "acceptance_rerun";  // identical in both runs; env var redirects

  const fs::path base =
      fs::temp_directory_path() / ("d2dmarl_acc_" + std::to_string(::getpid()));
  const fs::path da = base / "a";
  const fs::path db = base / "b";
  fs::remove_all(base);
  fs::create_directories(da);
  fs::create_directories(db);
  {
    EnvVarGuard guard(kOutputDirEnvVar, da.string());
    run(cfg);
  }
  {
    EnvVarGuard guard(kOutputDirEnvVar, db.string());
    run(cfg);
  }

  std::vector<std::string> files = {"resolved_config.json", "metrics.csv", "summary.csv"};
  for (std::uint64_t seed : cfg.seeds) {
    files.push_back("trainlog_maac_n2_seed" + std::to_string(seed) + ".csv");
    for (int i = 0; i < 2; ++i)
      files.push_back("weights_maac_n2_seed" + std::to_string(seed) + "/actor_" +
                      std::to_string(i) + ".mlpw");
  }
  int identical = 0;
  std::string first_diff;
  for (const auto& f : files) {
    if (read_file(da / f) == read_file(db / f))
      ++identical;
    else if (first_diff.empty())
      first_diff = f;
  }
  fs::remove_all(base);
  char buf[192];
  std::snprintf(buf, sizeof buf, "%d of %zu artifacts byte-identical across two runs%s%s",
                identical, files.size(), first_diff.empty() ? "" : "; first difference: ",
                first_diff.c_str());
  return {identical == static_cast<int>(files.size()), buf};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criteria") && i + 1 < argc) {
      wanted.clear();
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const int id = std::atoi(item.c_str());
        if (id < 1 || id > 10) {
          std::fprintf(stderr, "unknown criterion '%s' (valid: 1..10)\n", item.c_str());
          return 1;
        }
        wanted.insert(id);
      }
      if (wanted.empty()) {
        std::fprintf(stderr, "--criteria needs at least one id\n");
        return 1;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--criteria 1,2,...]\n", argv[0]);
      return 1;
    }
  }

  struct Entry {
    int id;
    const char* name;
    CriterionResult (*fn)();
  };
  const Entry entries[] = {
      {1, "gradient fidelity", criterion_gradients},
      {2, "SINR oracle equivalence", criterion_sinr_oracle},
      {3, "reward law", criterion_reward_law},
      {4, "alignment probability (0.5)^N", criterion_alignment},
      {5, "widest neighborhood equals full scope bitwise", criterion_scope_equivalence},
      {6, "desk-scale convergence vs random", criterion_convergence},
      {7, "outage and sum-rate ordering", criterion_ordering},
      {8, "soft-update geometric decay", criterion_soft_update},
      {9, "replay FIFO and uniform sampling", criterion_replay},
      {10, "end-to-end byte-identical rerun", criterion_determinism},
  };

  int failures = 0;
  int ran = 0;
  for (const Entry& e : entries) {
    if (!wanted.count(e.id)) continue;
    if (e.id == 6 || e.id == 7) {
      std::printf("criterion %d (%s): desk study\n", e.id, e.name);
      std::fflush(stdout);
      desk_study();  // idempotent; prints per-seed progress on first use
    }
    const CriterionResult r = e.fn();
    ++ran;
    if (!r.pass) ++failures;
    std::printf("[%s] criterion %d, %s: %s\n", r.pass ? "PASS" : "FAIL", e.id, e.name,
                r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
