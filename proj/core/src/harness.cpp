#include "duelbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "duelbench/baselines.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/swift.hpp"

namespace duelbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Named {
  const char* name;
  int value;
};

constexpr Named kFamilies[] = {
    {"stationary", static_cast<int>(EnvFamily::kStationary)},
    {"btl-switching", static_cast<int>(EnvFamily::kBtlSwitching)},
    {"thm1-adversary", static_cast<int>(EnvFamily::kThm1Adversary)},
    {"remark-b1", static_cast<int>(EnvFamily::kRemarkB1)},
    {"btl-flip", static_cast<int>(EnvFamily::kBtlFlip)},
};

constexpr Named kPolicies[] = {
    {"metaswift", static_cast<int>(PolicyKind::kMetaSwift)},
    {"swift", static_cast<int>(PolicyKind::kSwift)},
    {"if", static_cast<int>(PolicyKind::kInterleavedFiltering)},
    {"randduel", static_cast<int>(PolicyKind::kRandDuel)},
};

constexpr Named kIntervalModes[] = {
    {"exact", static_cast<int>(IntervalMode::kExact)},
    {"exhaustive", static_cast<int>(IntervalMode::kExhaustive)},
    {"dyadic", static_cast<int>(IntervalMode::kDyadic)},
};

template <std::size_t N>
int lookup(const Named (&table)[N], const std::string& name, const char* what) {
  for (const auto& n : table) {
    if (name == n.name) return n.value;
  }
  throw ConfigError(fmt::format("unknown {} '{}'", what, name));
}

template <std::size_t N>
std::string reverse_lookup(const Named (&table)[N], int value) {
  for (const auto& n : table) {
    if (n.value == value) return n.name;
  }
  return "?";
}

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_out(const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

}  // namespace

std::string to_string(EnvFamily family) {
  return reverse_lookup(kFamilies, static_cast<int>(family));
}
std::string to_string(PolicyKind kind) { return reverse_lookup(kPolicies, static_cast<int>(kind)); }
EnvFamily parse_env_family(const std::string& name) {
  return static_cast<EnvFamily>(lookup(kFamilies, name, "environment family"));
}
PolicyKind parse_policy_kind(const std::string& name) {
  return static_cast<PolicyKind>(lookup(kPolicies, name, "policy"));
}

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (horizon < static_cast<Round>(k)) throw ConfigError("horizon must be at least k");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if ((family == EnvFamily::kThm1Adversary || family == EnvFamily::kRemarkB1) && k != 3) {
    throw ConfigError(fmt::format("environment '{}' requires k = 3", to_string(family)));
  }
  if ((family == EnvFamily::kThm1Adversary || family == EnvFamily::kRemarkB1) &&
      !(epsilon > 0.0 && epsilon < 0.5)) {
    throw ConfigError("epsilon must lie in (0, 1/2)");
  }
  if ((policy == PolicyKind::kMetaSwift || policy == PolicyKind::kSwift) && !(c > 0.0)) {
    throw ConfigError("c must be positive");
  }
  if (family == EnvFamily::kBtlFlip) {
    const Round f = flip_round == 0 ? horizon / 2 + 1 : flip_round;
    if (f <= 1 || f > horizon) throw ConfigError("flip_round must lie in (1, horizon]");
  }
  Round previous = 1;
  for (Round cp : effective_changepoints()) {
    if (cp <= previous || cp > horizon) {
      throw ConfigError("changepoints must be strictly increasing within (1, horizon]");
    }
    previous = cp;
  }
}

std::vector<Round> ExperimentConfig::effective_changepoints() const {
  if (family != EnvFamily::kBtlSwitching) return {};
  if (!changepoints.empty()) return changepoints;
  std::vector<Round> out;
  const auto n = static_cast<Round>(num_changepoints);
  for (Round i = 1; i <= n; ++i) out.push_back(i * horizon / (n + 1));
  return out;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "family",     "k",          "horizon",       "changepoints",    "num_changepoints",
      "epsilon",    "flip_round", "policy",        "c",               "delta",
      "c_switch",
      "interval_mode", "trials",  "master_seed",   "out_dir",         "thin",
      "threads",    "policy_log", "sweep_grid",    "validation_envs", "max_changepoints",
      "validation_seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig c;
  try {
    if (j.contains("family")) c.family = parse_env_family(j["family"].get<std::string>());
    if (j.contains("k")) c.k = j["k"].get<std::size_t>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<Round>();
    if (j.contains("changepoints")) c.changepoints = j["changepoints"].get<std::vector<Round>>();
    if (j.contains("num_changepoints")) c.num_changepoints = j["num_changepoints"].get<std::size_t>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("flip_round")) c.flip_round = j["flip_round"].get<Round>();
    if (j.contains("policy")) c.policy = parse_policy_kind(j["policy"].get<std::string>());
    if (j.contains("c")) c.c = j["c"].get<double>();
    if (j.contains("c_switch")) c.c_switch = j["c_switch"].get<double>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("interval_mode")) {
      c.interval_mode = static_cast<IntervalMode>(
          lookup(kIntervalModes, j["interval_mode"].get<std::string>(), "interval mode"));
    }
    if (j.contains("trials")) c.trials = j["trials"].get<std::size_t>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("thin")) c.thin = j["thin"].get<Round>();
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
    if (j.contains("policy_log")) c.policy_log = j["policy_log"].get<bool>();
    if (j.contains("sweep_grid")) c.sweep_grid = j["sweep_grid"].get<std::vector<double>>();
    if (j.contains("validation_envs")) c.validation_envs = j["validation_envs"].get<std::size_t>();
    if (j.contains("max_changepoints")) c.max_changepoints = j["max_changepoints"].get<std::size_t>();
    if (j.contains("validation_seed")) c.validation_seed = j["validation_seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str());
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j = {{"family", to_string(c.family)},
            {"k", c.k},
            {"horizon", c.horizon},
            {"changepoints", c.changepoints},
            {"num_changepoints", c.num_changepoints},
            {"epsilon", c.epsilon},
            {"flip_round", c.flip_round},
            {"policy", to_string(c.policy)},
            {"c", c.c},
            {"c_switch", c.c_switch},
            {"delta", c.delta},
            {"interval_mode", reverse_lookup(kIntervalModes, static_cast<int>(c.interval_mode))},
            {"trials", c.trials},
            {"master_seed", c.master_seed},
            {"out_dir", c.out_dir},
            {"thin", c.thin},
            {"threads", c.threads},
            {"policy_log", c.policy_log},
            {"sweep_grid", c.sweep_grid},
            {"validation_envs", c.validation_envs},
            {"max_changepoints", c.max_changepoints},
            {"validation_seed", c.validation_seed}};
  return j.dump(2);
}

// ---------------------------------------------------------------------------

EnvironmentTrace build_trace(const ExperimentConfig& config, std::size_t trial) {
  RngStream rng(config.master_seed, StreamKey{trial, Purpose::kEnvironment, 0});
  switch (config.family) {
    case EnvFamily::kStationary:
      return switching_btl_trace(config.k, config.horizon, {}, rng);
    case EnvFamily::kBtlSwitching: {
      const auto cps = config.effective_changepoints();
      return switching_btl_trace(config.k, config.horizon, cps, rng);
    }
    case EnvFamily::kThm1Adversary:
      return condorcet_lower_bound_trace(config.horizon, config.epsilon, rng);
    case EnvFamily::kRemarkB1:
      return sst_violating_trace(config.horizon, config.epsilon, rng);
    case EnvFamily::kBtlFlip:
      return btl_flip_trace(config.k, config.horizon,
                            config.flip_round == 0 ? config.horizon / 2 + 1 : config.flip_round);
  }
  throw ConfigError("unhandled environment family");
}

std::unique_ptr<Policy> build_policy(const ExperimentConfig& config, std::size_t trial) {
  switch (config.policy) {
    case PolicyKind::kMetaSwift:
    case PolicyKind::kSwift: {
      SwiftConfig sc;
      sc.c = config.c;
      sc.c_switch = config.c_switch;
      sc.interval_mode = config.interval_mode;
      sc.replays = config.policy == PolicyKind::kMetaSwift;
      return std::make_unique<MetaSwift>(config.horizon, config.k, sc, config.master_seed, trial);
    }
    case PolicyKind::kInterleavedFiltering:
      return std::make_unique<InterleavedFiltering>(
          config.horizon, config.k, config.delta,
          RngStream(config.master_seed, StreamKey{trial, Purpose::kPolicy, 0}));
    case PolicyKind::kRandDuel:
      return std::make_unique<RandDuel>(
          config.horizon, config.k,
          RngStream(config.master_seed, StreamKey{trial, Purpose::kPolicy, 0}));
  }
  throw ConfigError("unhandled policy");
}

namespace {

TrialResult play(const ExperimentConfig& config, std::size_t trial, const EnvironmentTrace& trace,
                 Policy& policy) {
  RngStream duel_rng(config.master_seed, StreamKey{trial, Purpose::kDuel, 0});
  policy.enable_log(config.policy_log);

  TrialResult result;
  result.trial = trial;
  std::vector<std::pair<Arm, Arm>> plays;
  plays.reserve(static_cast<std::size_t>(trace.horizon()));
  double cumulative = 0.0;
  for (Round t = 1; t <= trace.horizon(); ++t) {
    const auto [i, j] = policy.select_pair(t);
    const DuelOutcome outcome = sample_duel(trace.at(t), i, j, t, duel_rng);
    policy.observe(t, outcome);
    plays.emplace_back(i, j);
    cumulative += round_regret(trace, t, i, j);
    if (t % config.thin == 0 || t == trace.horizon()) {
      result.rounds.push_back(t);
      result.cum_regret.push_back(cumulative);
    }
  }
  result.final_regret = dynamic_regret(trace, plays);
  result.restart_rounds = policy.restart_rounds();
  result.restart_flags.assign(result.rounds.size(), 0);
  std::size_t slot = 0;
  for (Round r : result.restart_rounds) {
    while (slot < result.rounds.size() && result.rounds[slot] < r) ++slot;
    if (slot < result.rounds.size()) result.restart_flags[slot] = 1;
  }
  result.winner_changes = count_changes(trace).winner_changes;
  if (config.policy_log) result.policy_log = policy.log();
  return result;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial) {
  config.validate();
  const EnvironmentTrace trace = build_trace(config, trial);
  auto policy = build_policy(config, trial);
  return play(config, trial, trace, *policy);
}

Summary summarize(const std::vector<TrialResult>& trials) {
  Summary s;
  if (trials.empty()) return s;
  const auto n = static_cast<double>(trials.size());
  double sum = 0.0, restarts = 0.0, changes = 0.0;
  for (const auto& t : trials) {
    sum += t.final_regret;
    restarts += static_cast<double>(t.restart_rounds.size());
    changes += static_cast<double>(t.winner_changes);
  }
  s.mean_regret = sum / n;
  s.mean_restarts = restarts / n;
  s.mean_winner_changes = changes / n;
  if (trials.size() > 1) {
    double ss = 0.0;
    for (const auto& t : trials) ss += (t.final_regret - s.mean_regret) * (t.final_regret - s.mean_regret);
    s.std_regret = std::sqrt(ss / (n - 1.0));
    s.std_defined = true;
  }
  return s;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunResult out;
  out.trials.resize(config.trials);

  std::size_t workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  workers = std::clamp<std::size_t>(workers, 1, config.trials);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t failed_trial = 0;
  auto work = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      try {
        out.trials[i] = run_trial(config, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error || i < failed_trial) {
          first_error = std::current_exception();
          failed_trial = i;
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("trial {}: {}", failed_trial, e.what()));
    }
  }
  out.summary = summarize(out.trials);
  return out;
}

// ---------------------------------------------------------------------------

void write_regret_csv(const std::string& path, const RunResult& result) {
  auto out = open_out(path);
  out << "trial,t,cum_regret,restart_flag\n";
  for (const auto& tr : result.trials) {
    for (std::size_t n = 0; n < tr.rounds.size(); ++n) {
      out << tr.trial << ',' << tr.rounds[n] << ',' << fixed(tr.cum_regret[n]) << ','
          << (tr.restart_flags[n] ? 1 : 0) << '\n';
    }
  }
}

void write_summary_csv(const std::string& path, const ExperimentConfig& config,
                       const RunResult& result) {
  auto out = open_out(path);
  const Summary& s = result.summary;
  out << "policy,env,S,trials,mean_regret,std_regret,mean_restarts\n";
  out << to_string(config.policy) << ',' << to_string(config.family) << ','
      << fmt::format("{:.2f}", s.mean_winner_changes) << ',' << result.trials.size() << ','
      << fixed(s.mean_regret) << ',' << fixed(s.std_defined ? s.std_regret : 0.0) << ','
      << fixed(s.mean_restarts) << '\n';
}

void write_bands_csv(const std::string& path, const RunResult& result) {
  auto out = open_out(path);
  out << "t,mean_cum_regret,std_cum_regret\n";
  if (result.trials.empty()) return;
  const auto& rounds = result.trials.front().rounds;
  const auto n = static_cast<double>(result.trials.size());
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    double sum = 0.0;
    for (const auto& tr : result.trials) sum += tr.cum_regret[r];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& tr : result.trials) ss += (tr.cum_regret[r] - mean) * (tr.cum_regret[r] - mean);
    const double sd = result.trials.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out << rounds[r] << ',' << fixed(mean) << ',' << fixed(sd) << '\n';
  }
}

void write_outputs(const ExperimentConfig& config, const RunResult& result) {
  const fs::path dir(config.out_dir);
  write_regret_csv((dir / "regret.csv").string(), result);
  write_summary_csv((dir / "summary.csv").string(), config, result);
  write_bands_csv((dir / "bands.csv").string(), result);
  if (config.policy_log) {
    for (const auto& tr : result.trials) {
      auto out = open_out((dir / fmt::format("policy_log_trial{}.tsv", tr.trial)).string());
      write_round_log_header(out);
      for (const auto& row : tr.policy_log) write_round_log(out, row);
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<Round> validation_changepoints(const ExperimentConfig& config, std::size_t index) {
  RngStream rng(config.validation_seed, StreamKey{index, Purpose::kValidation, 0});
  const auto available = static_cast<std::uint64_t>(std::max<Round>(config.horizon - 1, 0));
  const std::uint64_t wanted =
      std::min<std::uint64_t>(rng.uniform_index(config.max_changepoints + 1), available);
  std::set<Round> chosen;
  while (chosen.size() < wanted) chosen.insert(2 + static_cast<Round>(rng.uniform_index(available)));
  return {chosen.begin(), chosen.end()};
}

SweepResult sweep_constant(const ExperimentConfig& config, const std::vector<double>& grid,
                           const std::vector<double>& switch_grid) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  config.validate();
  if (config.validation_envs < 1) throw ConfigError("validation_envs must be at least 1");
  for (double c : grid) {
    if (!(c > 0.0)) throw ConfigError("sweep grid values must be positive");
  }
  for (double c : switch_grid) {
    if (!(c > 0.0)) throw ConfigError("switch grid values must be positive");
  }

  // One validation environment per "trial"; the same environments, duel
  // noise and policy seeds are reused for every grid value.
  std::vector<ExperimentConfig> envs;
  for (std::size_t e = 0; e < config.validation_envs; ++e) {
    ExperimentConfig v = config;
    v.family = EnvFamily::kBtlSwitching;
    v.changepoints = validation_changepoints(config, e);
    v.num_changepoints = 0;
    v.master_seed = config.validation_seed;
    v.policy_log = false;
    v.thin = config.horizon;
    envs.push_back(std::move(v));
  }

  std::vector<std::pair<double, double>> settings;
  for (double c : grid) {
    if (switch_grid.empty()) {
      settings.emplace_back(c, 0.0);
    } else {
      for (double cs : switch_grid) settings.emplace_back(c, cs);
    }
  }

  SweepResult result;
  for (const auto& [c, cs] : settings) {
    std::vector<TrialResult> runs(envs.size());
    std::atomic<std::size_t> next{0};
    std::size_t workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
    workers = std::clamp<std::size_t>(workers, 1, envs.size());
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&, c = c, cs = cs] {
      for (std::size_t e = next++; e < envs.size(); e = next++) {
        try {
          ExperimentConfig v = envs[e];
          v.c = c;
          v.c_switch = cs;
          runs[e] = run_trial(v, e);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    const Summary s = summarize(runs);
    result.rows.push_back(SweepRow{c, cs, s.mean_regret, s.std_defined ? s.std_regret : 0.0});
  }
  const auto best = std::min_element(result.rows.begin(), result.rows.end(),
                                     [](const SweepRow& a, const SweepRow& b) {
                                       return a.mean_regret < b.mean_regret;
                                     });
  result.best_c = best->c;
  result.best_c_switch = best->c_switch;
  return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  auto out = open_out(path);
  out << "c,c_switch,mean_regret,std_regret,selected\n";
  for (const auto& row : result.rows) {
    const bool selected = row.c == result.best_c && row.c_switch == result.best_c_switch;
    out << fmt::format("{:.6g}", row.c) << ',' << fmt::format("{:.6g}", row.c_switch) << ','
        << fixed(row.mean_regret) << ',' << fixed(row.std_regret) << ',' << (selected ? 1 : 0)
        << '\n';
  }
}

// ---------------------------------------------------------------------------

std::string analyze_trace_json(const EnvironmentTrace& trace, ScanMode mode) {
  const SigShiftReport report = significant_shifts(trace, mode);
  const ChangeCounts changes = count_changes(trace);
  json phases = json::array();
  for (const auto& p : report.phases) {
    phases.push_back({{"start", p.start},
                      {"end", p.end},
                      {"last_safe_arm", p.last_safe_arm + 1},
                      {"closed", p.closed}});
  }
  json j = {{"tau", report.tau},
            {"sig_count", report.sig_count()},
            {"phases", phases},
            {"V_T", cw_variation(trace)},
            {"L", changes.matrix_changes},
            {"S", changes.winner_changes},
            {"approximate", report.approximate}};
  return j.dump(2);
}

}  // namespace duelbench
