#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "duelbench/environments.hpp"
#include "duelbench/oracle.hpp"
#include "duelbench/policy.hpp"
#include "duelbench/window_search.hpp"

namespace duelbench {

enum class EnvFamily {
  kStationary,    // geometric BTL, identity ranking throughout
  kBtlSwitching,  // geometric BTL, random re-ranking at each changepoint
  kThm1Adversary, // Condorcet lower-bound mixture (K = 3)
  kRemarkB1,      // SST-violating mixture (K = 3)
  kBtlFlip,       // geometric BTL reversed once at flip_round
};

enum class PolicyKind { kMetaSwift, kSwift, kInterleavedFiltering, kRandDuel };

std::string to_string(EnvFamily family);
std::string to_string(PolicyKind kind);
EnvFamily parse_env_family(const std::string& name);
PolicyKind parse_policy_kind(const std::string& name);

struct ExperimentConfig {
  // Environment.
  EnvFamily family = EnvFamily::kBtlSwitching;
  std::size_t k = 10;
  Round horizon = 50000;
  // Explicit changepoints; when empty, num_changepoints evenly spaced ones
  // (round i * T / (n + 1)) are used for kBtlSwitching.
  std::vector<Round> changepoints;
  std::size_t num_changepoints = 4;
  double epsilon = 1e-3;
  // 0 selects T / 2 + 1.
  Round flip_round = 0;

  // Policy.
  PolicyKind policy = PolicyKind::kMetaSwift;
  double c = 1.0;
  // Switching constant; <= 0 reuses c.
  double c_switch = 0.0;
  // IF confidence parameter; <= 0 selects 1 / (T K^2).
  double delta = 0.0;
  IntervalMode interval_mode = IntervalMode::kExact;

  // Execution.
  std::size_t trials = 50;
  std::uint64_t master_seed = 1;
  std::string out_dir = "duelbench_out";
  // Keep every thin-th round of the regret series (plus round T).
  Round thin = 1;
  // 0 selects std::thread::hardware_concurrency().
  std::size_t threads = 0;
  bool policy_log = false;

  // Constant sweep.
  std::vector<double> sweep_grid;
  std::size_t validation_envs = 20;
  std::size_t max_changepoints = 1000;
  std::uint64_t validation_seed = 1000003;

  // Throws ConfigError on inconsistent settings.
  void validate() const;
  std::vector<Round> effective_changepoints() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& config);

EnvironmentTrace build_trace(const ExperimentConfig& config, std::size_t trial);
std::unique_ptr<Policy> build_policy(const ExperimentConfig& config, std::size_t trial);

struct TrialResult {
  std::size_t trial = 0;
  double final_regret = 0.0;
  // Rounds kept after thinning and the cumulative regret at each.
  std::vector<Round> rounds;
  std::vector<double> cum_regret;
  // restart_flags[n]: an episode restart happened in (rounds[n-1], rounds[n]].
  std::vector<char> restart_flags;
  std::vector<Round> restart_rounds;
  std::size_t winner_changes = 0;
  std::vector<RoundLog> policy_log;
};

struct Summary {
  double mean_regret = 0.0;
  double std_regret = 0.0;
  // False for a single trial, where the sample deviation is undefined.
  bool std_defined = false;
  double mean_restarts = 0.0;
  double mean_winner_changes = 0.0;
};

struct RunResult {
  std::vector<TrialResult> trials;
  Summary summary;
};

// Deterministic in (config, trial): builds the trace and the policy from
// substreams of the master seed, plays T rounds, and scores them with the
// oracle's exact dynamic regret.
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

// Mean and N-1 standard deviation of final regret across trials.
Summary summarize(const std::vector<TrialResult>& trials);

// Runs every trial (in parallel when config.threads != 1); per-trial results
// do not depend on the thread count.
RunResult run_experiment(const ExperimentConfig& config);

// regret.csv: trial,t,cum_regret,restart_flag
void write_regret_csv(const std::string& path, const RunResult& result);
// summary.csv: policy,env,S,trials,mean_regret,std_regret,mean_restarts
void write_summary_csv(const std::string& path, const ExperimentConfig& config,
                       const RunResult& result);
// bands.csv: t,mean_cum_regret,std_cum_regret (mean +/- sigma per round)
void write_bands_csv(const std::string& path, const RunResult& result);
// Writes all three (and policy logs when enabled) under config.out_dir.
void write_outputs(const ExperimentConfig& config, const RunResult& result);

struct SweepRow {
  double c = 0.0;
  // 0 when the switching constant follows c.
  double c_switch = 0.0;
  double mean_regret = 0.0;
  double std_regret = 0.0;
};

struct SweepResult {
  double best_c = 0.0;
  double best_c_switch = 0.0;
  std::vector<SweepRow> rows;
};

// Validation changepoints for environment `index`: a count uniform on
// [0, max_changepoints] and that many distinct rounds in (1, T].
std::vector<Round> validation_changepoints(const ExperimentConfig& config, std::size_t index);

// For each C in `grid` (crossed with each switching constant in `switch_grid`
// when that is nonempty), runs config.policy on config.validation_envs
// switching BTL environments seeded by validation_seed and keeps the setting
// with the lowest mean regret (first on ties).
SweepResult sweep_constant(const ExperimentConfig& config, const std::vector<double>& grid,
                           const std::vector<double>& switch_grid = {});
void write_sweep_csv(const std::string& path, const SweepResult& result);

// JSON report for a trace: tau, sig_count, phases, V_T, L, S (arms 1-based).
std::string analyze_trace_json(const EnvironmentTrace& trace, ScanMode mode = ScanMode::kExact);

}  // namespace duelbench
