#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "duelbench/preference.hpp"

namespace duelbench {

// One line of the optional per-round policy log.
struct RoundLog {
  Round t = 0;
  std::size_t episode = 0;
  std::size_t stack_depth = 0;
  Arm candidate = 0;
  Arm sampled_arm = 0;
  std::size_t active_set_size = 0;
  std::size_t master_set_size = 0;
  bool outcome = false;
  // Round t is the first round of a new episode (not counting the first).
  bool restart = false;
};

// Tab-separated, arms 1-based: t, episode, stack_depth, candidate,
// sampled_arm, active_set_size, master_set_size, outcome, restart_flag.
void write_round_log_header(std::ostream& out);
void write_round_log(std::ostream& out, const RoundLog& row);

// A dueling-bandit learner. The driver calls select_pair(t) and then
// observe(t, outcome) exactly once per round, for t = 1, 2, ..., T. Policies
// only ever see their own pairs' outcomes.
class Policy {
 public:
  Policy(Round horizon, std::size_t k);
  virtual ~Policy() = default;

  Policy(const Policy&) = delete;
  Policy& operator=(const Policy&) = delete;

  virtual std::string name() const = 0;

  // Throws std::logic_error if rounds are skipped or repeated.
  std::pair<Arm, Arm> select_pair(Round t);
  void observe(Round t, const DuelOutcome& outcome);

  Round horizon() const { return horizon_; }
  std::size_t k() const { return k_; }

  // Rounds at which a new episode began (empty for policies without episodes).
  virtual std::vector<Round> restart_rounds() const { return {}; }

  // Per-round log, populated only after enable_log(true) by policies that
  // support it.
  void enable_log(bool on) { log_enabled_ = on; }
  const std::vector<RoundLog>& log() const { return log_; }

 protected:
  virtual std::pair<Arm, Arm> do_select(Round t) = 0;
  virtual void do_observe(Round t, const DuelOutcome& outcome) = 0;

  bool log_enabled() const { return log_enabled_; }
  void append_log(const RoundLog& row) { log_.push_back(row); }

 private:
  Round horizon_;
  std::size_t k_;
  Round next_round_ = 1;
  bool awaiting_observation_ = false;
  std::pair<Arm, Arm> pending_{0, 0};
  bool log_enabled_ = false;
  std::vector<RoundLog> log_;
};

}  // namespace duelbench
