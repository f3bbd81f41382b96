#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "duelbench/errors.hpp"
#include "duelbench/harness.hpp"

using namespace duelbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("duelbench_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small(PolicyKind policy, EnvFamily family) {
  ExperimentConfig c;
  c.policy = policy;
  c.family = family;
  c.k = 5;
  c.horizon = 2000;
  c.trials = 4;
  c.c = 0.3;
  c.threads = 1;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DUELBENCH_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults match the standard experiment setup") {
  const ExperimentConfig c = config_from_json_text("{}");
  CHECK(c.k == 10);
  CHECK(c.horizon == 50000);
  CHECK(c.trials == 50);
  CHECK(c.effective_changepoints() == std::vector<Round>{10000, 20000, 30000, 40000});
  ExperimentConfig stationary = c;
  stationary.family = EnvFamily::kStationary;
  CHECK(stationary.effective_changepoints().empty());
}

TEST_CASE("config parsing") {
  const auto c = config_from_json_text(R"({"family":"thm1-adversary","k":3,"horizon":100,
      "policy":"if","epsilon":0.01,"trials":2,"master_seed":9,"interval_mode":"dyadic"})");
  CHECK(c.family == EnvFamily::kThm1Adversary);
  CHECK(c.policy == PolicyKind::kInterleavedFiltering);
  CHECK(c.master_seed == 9);
  CHECK(c.interval_mode == IntervalMode::kDyadic);
  CHECK_NOTHROW(c.validate());
  const auto again = config_from_json_text(config_to_json_text(c));
  CHECK(config_to_json_text(again) == config_to_json_text(c));

  CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("[]"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"colour":1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"k":"ten"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"policy":"ucb"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"family":"mars"})"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config validation") {
  auto bad = [](auto edit) {
    ExperimentConfig c = small(PolicyKind::kMetaSwift, EnvFamily::kBtlSwitching);
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](auto& c) { c.trials = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.horizon = 3; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.family = EnvFamily::kThm1Adversary; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.family = EnvFamily::kRemarkB1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.c = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.changepoints = {5, 5}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.changepoints = {1}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.thin = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(run_trial(bad([](auto& c) { c.family = EnvFamily::kThm1Adversary; }), 0), ConfigError);
}

TEST_CASE("RandDuel regret on the stationary setup") {
  ExperimentConfig c;
  c.family = EnvFamily::kStationary;
  c.policy = PolicyKind::kRandDuel;
  const TrialResult r = run_trial(c, 0);
  // T * mean winner gap of the K = 10 geometric BTL.
  double gbar = 0.0;
  for (int rank = 1; rank <= 10; ++rank) gbar += (0.5 / (0.5 + std::pow(2.0, -rank)) - 0.5) / 10.0;
  CHECK(50000.0 * gbar == doctest::Approx(18687.3).epsilon(1e-4));
  CHECK(std::abs(r.final_regret - 50000.0 * gbar) < 200.0);
}

TEST_CASE("trial results are deterministic and well formed") {
  for (PolicyKind p : {PolicyKind::kMetaSwift, PolicyKind::kSwift, PolicyKind::kInterleavedFiltering,
                       PolicyKind::kRandDuel}) {
    CAPTURE(to_string(p));
    auto c = small(p, EnvFamily::kBtlSwitching);
    c.thin = 7;
    const auto a = run_trial(c, 3);
    const auto b = run_trial(c, 3);
    CHECK(a.cum_regret == b.cum_regret);
    CHECK(a.restart_rounds == b.restart_rounds);
    CHECK(a.rounds.back() == c.horizon);
    CHECK(a.rounds.front() == 7);
    CHECK(a.cum_regret.back() == doctest::Approx(a.final_regret));
    for (std::size_t n = 1; n < a.cum_regret.size(); ++n) CHECK(a.cum_regret[n] >= a.cum_regret[n - 1]);
    std::size_t flags = std::accumulate(a.restart_flags.begin(), a.restart_flags.end(), std::size_t{0});
    CHECK(flags <= a.restart_rounds.size());
    CHECK(a.winner_changes <= 4);
  }
}

TEST_CASE("parallel and serial runs agree per trial") {
  auto c = small(PolicyKind::kMetaSwift, EnvFamily::kBtlSwitching);
  c.trials = 6;
  const auto serial = run_experiment(c);
  c.threads = 3;
  const auto parallel = run_experiment(c);
  REQUIRE(serial.trials.size() == parallel.trials.size());
  for (std::size_t i = 0; i < serial.trials.size(); ++i) {
    CHECK(serial.trials[i].trial == i);
    CHECK(serial.trials[i].cum_regret == parallel.trials[i].cum_regret);
    CHECK(serial.trials[i].restart_rounds == parallel.trials[i].restart_rounds);
  }
}

TEST_CASE("summary statistics") {
  std::vector<TrialResult> trials(4);
  const double finals[] = {10.0, 12.0, 14.0, 20.0};
  for (int i = 0; i < 4; ++i) {
    trials[i].final_regret = finals[i];
    trials[i].restart_rounds.resize(static_cast<std::size_t>(i));
  }
  const Summary s = summarize(trials);
  CHECK(s.mean_regret == 14.0);
  // Sample variance with N - 1: (16 + 4 + 0 + 36) / 3.
  CHECK(s.std_regret == doctest::Approx(std::sqrt(56.0 / 3.0)));
  CHECK(s.std_defined);
  CHECK(s.mean_restarts == 1.5);

  const Summary one = summarize({trials[0]});
  CHECK_FALSE(one.std_defined);
  CHECK(one.std_regret == 0.0);
}

TEST_CASE("CSV outputs") {
  const auto dir = scratch("csv");
  auto c = small(PolicyKind::kSwift, EnvFamily::kBtlFlip);
  c.out_dir = dir.string();
  c.trials = 2;
  c.thin = 500;
  c.policy_log = true;
  const auto result = run_experiment(c);
  write_outputs(c, result);

  const std::string regret = slurp(dir / "regret.csv");
  CHECK(regret.rfind("trial,t,cum_regret,restart_flag\n", 0) == 0);
  CHECK(regret.find('\r') == std::string::npos);
  CHECK(std::count(regret.begin(), regret.end(), '\n') == 1 + 2 * 4);

  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("policy,env,S,trials,mean_regret,std_regret,mean_restarts\nswift,btl-flip,1.00,2,", 0) == 0);
  const std::string bands = slurp(dir / "bands.csv");
  CHECK(bands.rfind("t,mean_cum_regret,std_cum_regret\n", 0) == 0);
  const std::string log = slurp(dir / "policy_log_trial1.tsv");
  CHECK(log.rfind("t\tepisode\tstack_depth\tcandidate\tsampled_arm\tactive_set_size\tmaster_set_size\toutcome\trestart_flag\n", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 1 + 2000);
}

TEST_CASE("validation changepoints") {
  ExperimentConfig c;
  c.horizon = 5000;
  c.max_changepoints = 50;
  std::set<std::size_t> counts;
  for (std::size_t e = 0; e < 30; ++e) {
    const auto cps = validation_changepoints(c, e);
    counts.insert(cps.size());
    CHECK(cps.size() <= 50);
    for (std::size_t n = 0; n < cps.size(); ++n) {
      CHECK(cps[n] >= 2);
      CHECK(cps[n] <= 5000);
      if (n > 0) CHECK(cps[n] > cps[n - 1]);
    }
    CHECK(cps == validation_changepoints(c, e));
  }
  CHECK(counts.size() > 5);
}

TEST_CASE("constant sweep") {
  auto c = small(PolicyKind::kMetaSwift, EnvFamily::kBtlSwitching);
  c.validation_envs = 3;
  c.max_changepoints = 5;
  const auto single = sweep_constant(c, {0.7});
  CHECK(single.best_c == 0.7);
  REQUIRE(single.rows.size() == 1);

  const auto grid = sweep_constant(c, {0.2, 0.4, 0.8});
  CHECK(grid.rows.size() == 3);
  double best = 1e300;
  for (const auto& row : grid.rows) best = std::min(best, row.mean_regret);
  for (const auto& row : grid.rows) {
    if (row.c == grid.best_c) CHECK(row.mean_regret == best);
  }
  const auto frozen = sweep_constant(c, {1e6});
  CHECK(frozen.rows[0].mean_regret >= best);

  const auto crossed = sweep_constant(c, {0.2, 0.4}, {0.05, 0.1});
  CHECK(crossed.rows.size() == 4);
  CHECK_THROWS_AS(sweep_constant(c, {}), ConfigError);
  CHECK_THROWS_AS(sweep_constant(c, {-1.0}), ConfigError);

  const auto dir = scratch("sweep");
  write_sweep_csv((dir / "sweep.csv").string(), crossed);
  const std::string text = slurp(dir / "sweep.csv");
  CHECK(text.rfind("c,c_switch,mean_regret,std_regret,selected\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("analyze JSON") {
  const auto trace = btl_flip_trace(3, 2000, 1001);
  const auto j = nlohmann::json::parse(analyze_trace_json(trace));
  CHECK(j["sig_count"] == 1);
  CHECK(j["tau"].size() == 2);
  CHECK(j["tau"][0] == 1);
  CHECK(j["phases"].size() == 2);
  CHECK(j["phases"][0]["start"] == 1);
  CHECK(j["phases"][0]["last_safe_arm"] == 1);
  CHECK(j["phases"][1]["last_safe_arm"] == 3);
  CHECK(j["phases"][1]["end"] == 2000);
  CHECK(j["L"] == 1);
  CHECK(j["S"] == 1);
  CHECK(j["V_T"].get<double>() > 0.0);
}

TEST_CASE("CLI exit codes and outputs") {
  const auto dir = scratch("cli");
  {
    std::ofstream(dir / "ok.json") << R"({"family":"stationary","k":4,"horizon":500,"trials":2,"policy":"randduel","threads":1})";
    std::ofstream(dir / "bad.json") << R"({"family":"stationary","k":"x"})";
    std::ofstream(dir / "thm1.json") << R"({"family":"thm1-adversary","k":4})";
    std::ofstream(dir / "broken.trace") << "5 2\nSEGMENTS 1\n1 missing.txt\n";
  }
  const std::string out = (dir / "out").string();
  CHECK(run_cli("run --config " + (dir / "ok.json").string() + " --out " + out) == 0);
  CHECK(fs::exists(dir / "out" / "regret.csv"));
  CHECK(fs::exists(dir / "out" / "summary.csv"));
  CHECK(run_cli("run --config " + (dir / "ok.json").string() + " --out " + out + " --policy if --trials 1") == 0);
  CHECK(slurp(dir / "out" / "summary.csv").find("\nif,stationary,0.00,1,") != std::string::npos);
  CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "thm1.json").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "ok.json").string() + " --policy ucb") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("sweep --config " + (dir / "ok.json").string() + " --grid 0.1,abc") == 2);
  CHECK(run_cli("analyze " + (dir / "broken.trace").string()) == 2);

  CHECK(run_cli("export-trace --config " + (dir / "ok.json").string() + " --trace-out " +
                (dir / "t" / "x.trace").string()) == 0);
  CHECK(run_cli("analyze " + (dir / "t" / "x.trace").string()) == 0);
}
