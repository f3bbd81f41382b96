#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "duelbench/environments.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::optional<std::string> policy;
  std::optional<std::string> env;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> c;
  std::optional<double> c_switch;
  std::optional<long long> thin;
  std::optional<std::size_t> threads;
  bool policy_log = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--policy", o.policy, "metaswift | swift | if | randduel");
  cmd->add_option("--env", o.env, "stationary | btl-switching | thm1-adversary | remark-b1 | btl-flip");
  cmd->add_option("--trials", o.trials, "number of trials");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--c", o.c, "eviction (and default switching) threshold constant");
  cmd->add_option("--c-switch", o.c_switch, "switching threshold constant");
  cmd->add_option("--thin", o.thin, "keep every n-th round in regret.csv");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--policy-log", o.policy_log, "write per-round policy logs");
}

duelbench::ExperimentConfig load(const std::string& path, const Overrides& o) {
  auto config = duelbench::load_config_file(path);
  if (o.policy) config.policy = duelbench::parse_policy_kind(*o.policy);
  if (o.env) config.family = duelbench::parse_env_family(*o.env);
  if (o.trials) config.trials = *o.trials;
  if (o.seed) config.master_seed = *o.seed;
  if (o.out) config.out_dir = *o.out;
  if (o.c) config.c = *o.c;
  if (o.c_switch) config.c_switch = *o.c_switch;
  if (o.thin) config.thin = *o.thin;
  if (o.threads) config.threads = *o.threads;
  if (o.policy_log) config.policy_log = true;
  config.validate();
  return config;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw duelbench::ConfigError("bad grid value '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw duelbench::ConfigError("sweep grid is empty");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-stationary dueling bandit benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "run trials and write regret/summary CSVs");
  run->add_option("--config", config_path, "JSON config file")->required();
  add_overrides(run, overrides);

  std::string grid_text;
  std::string switch_grid_text;
  auto* sweep = app.add_subcommand("sweep", "tune C on held-out switching BTL environments");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--grid", grid_text, "comma-separated C values")->required();
  sweep->add_option("--switch-grid", switch_grid_text,
                    "comma-separated switching constants (default: follow C)");
  add_overrides(sweep, overrides);

  std::string trace_path;
  bool approx = false;
  auto* analyze = app.add_subcommand("analyze", "significant shifts and variation measures of a trace");
  analyze->add_option("trace", trace_path, "trace file")->required();
  analyze->add_flag("--approx", approx, "dyadic window scan instead of the exact one");

  std::size_t export_trial = 0;
  std::string export_path;
  auto* export_cmd = app.add_subcommand("export-trace", "write the trace a run would use");
  export_cmd->add_option("--config", config_path, "JSON config file")->required();
  export_cmd->add_option("--trial", export_trial, "trial index");
  export_cmd->add_option("--trace-out", export_path, "trace file to write")->required();
  add_overrides(export_cmd, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto config = load(config_path, overrides);
      std::filesystem::create_directories(config.out_dir);
      const auto result = duelbench::run_experiment(config);
      duelbench::write_outputs(config, result);
      const auto& s = result.summary;
      std::cout << duelbench::to_string(config.policy) << " on " << duelbench::to_string(config.family)
                << ": mean regret " << s.mean_regret << ", std " << (s.std_defined ? s.std_regret : 0.0)
                << (s.std_defined ? "" : " (undefined for one trial)") << ", mean restarts "
                << s.mean_restarts << '\n';
    } else if (sweep->parsed()) {
      const auto config = load(config_path, overrides);
      const auto grid = parse_grid(grid_text);
      const auto switch_grid =
          switch_grid_text.empty() ? std::vector<double>{} : parse_grid(switch_grid_text);
      const auto result = duelbench::sweep_constant(config, grid, switch_grid);
      const auto path = (std::filesystem::path(config.out_dir) / "sweep.csv").string();
      duelbench::write_sweep_csv(path, result);
      for (const auto& row : result.rows) {
        std::cout << "C=" << row.c << " C_switch=" << row.c_switch << " mean=" << row.mean_regret
                  << " std=" << row.std_regret << '\n';
      }
      std::cout << "best C " << result.best_c << " C_switch " << result.best_c_switch << '\n';
    } else if (analyze->parsed()) {
      const auto trace = duelbench::read_trace_file(trace_path);
      std::cout << duelbench::analyze_trace_json(
                       trace, approx ? duelbench::ScanMode::kApprox : duelbench::ScanMode::kExact)
                << '\n';
    } else if (export_cmd->parsed()) {
      const auto config = load(config_path, overrides);
      const auto parent = std::filesystem::path(export_path).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      duelbench::write_trace_file(export_path, duelbench::build_trace(config, export_trial));
    }
  } catch (const duelbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const duelbench::ArgumentError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const duelbench::ClassError& e) {
    std::cerr << "environment error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return EXIT_SUCCESS;
}
