#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "duelbench/policy.hpp"
#include "duelbench/rng.hpp"
#include "duelbench/window_search.hpp"

namespace duelbench {

// What the learner knows about one played round: enough to recompute the
// importance-weighted gap estimate for every arm.
struct EstimateRecord {
  Round round = 0;
  Arm candidate = 0;
  Arm sampled = 0;
  std::size_t active_size = 0;
  // Outcome of the duel (candidate, sampled); true when the candidate won.
  bool outcome = false;
};

// Estimate of delta_t(candidate, a): |A_t| * O_t * 1{a_t = a} - 1/2. Unbiased
// for arms in the active set; for arms outside it the estimate is always -1/2.
double gap_estimate(const EstimateRecord& record, Arm a);

// Estimate of delta_t(a, candidate), defined as -gap_estimate(record, a).
inline double reversed_gap_estimate(const EstimateRecord& record, Arm a) {
  return -gap_estimate(record, a);
}

// Replay lengths 2, 4, ..., 2^ceil(log2 T).
std::vector<std::int64_t> replay_lengths(Round horizon);

// P(B_{s,m} = 1) = 1 / sqrt(m (s - episode_start)), for s > episode_start.
double replay_probability(Round s, Round episode_start, std::int64_t m);

// Returns the replay length to launch at round s of an episode, or 0 for none.
// Arguments: (episode index, episode start, s).
using ReplaySchedule = std::function<std::int64_t(std::size_t, Round, Round)>;

struct SwiftConfig {
  // Constant in front of log(T) in the eviction threshold, and in the
  // switching threshold unless c_switch is positive.
  double c = 1.0;
  double c_switch = 0.0;
  IntervalMode interval_mode = IntervalMode::kExact;
  // Without replays each episode runs a single base instance (plain SWIFT
  // with episode restarts).
  bool replays = true;
  // Overrides the random replay schedule; used to force replays in tests.
  ReplaySchedule schedule;
};

// Episodic meta-algorithm over a stack of switching-interleaved-filtering base
// instances.
//
// Every round the top of the stack plays (candidate, a_t) with a_t uniform on
// its active set. Between rounds, in order:
//   1. a replay of length m may be pushed (largest m with B_{t,m} = 1); it
//      starts with every arm active and a uniformly random candidate;
//   2. instances whose scheduled duration has elapsed return;
//   3. the surviving top evicts arms with a window in [its start, t) whose
//      estimated gap sum crosses the threshold, and the master set drops arms
//      with such a window anywhere in [episode start, t);
//   4. the candidate switches to the active arm that most clearly dominates
//      the recent candidate sequence, if any does;
//   5. an empty master set ends the episode: the whole stack unwinds and a
//      fresh root instance starts at t.
//
// Eviction flags are kept per stack instance and refreshed every round, so an
// instance's active set is always [K] minus the arms it has flagged. This is
// the same set the saved-and-restored active set of a resumed parent holds.
class MetaSwift : public Policy {
 public:
  MetaSwift(Round horizon, std::size_t k, SwiftConfig config, std::uint64_t seed,
            std::uint64_t trial);

  std::string name() const override { return config_.replays ? "metaswift" : "swift"; }
  std::vector<Round> restart_rounds() const override { return restarts_; }

  Arm candidate() const { return candidate_; }
  std::vector<Arm> active_set() const;
  std::vector<Arm> master_set() const;
  std::size_t stack_depth() const { return stack_.size(); }
  std::size_t max_stack_depth() const { return max_depth_; }
  std::size_t episode() const { return episode_; }
  Round episode_start() const { return stack_.front().start; }
  std::size_t replays_started() const { return replays_started_; }
  const std::vector<EstimateRecord>& estimates() const { return records_; }
  const WindowThreshold& threshold() const { return threshold_; }
  const WindowThreshold& switch_threshold() const { return switch_threshold_; }

 protected:
  std::pair<Arm, Arm> do_select(Round t) override;
  void do_observe(Round t, const DuelOutcome& outcome) override;

 private:
  struct Instance {
    Round start;
    std::int64_t duration;
    std::vector<char> evicted;
  };

  void push_instance(Round start, std::int64_t duration);
  void start_episode(Round t);
  void between_rounds(Round next);
  void refresh_evictions(Round s2);
  std::optional<Arm> switch_target(const Instance& top, Round s2) const;
  std::int64_t scheduled_replay(Round s) const;

  SwiftConfig config_;
  std::uint64_t seed_;
  std::uint64_t trial_;
  RngStream rng_;
  WindowThreshold threshold_;
  WindowThreshold switch_threshold_;
  std::vector<std::int64_t> lengths_;

  std::vector<Instance> stack_;
  std::size_t episode_ = 0;
  Arm candidate_ = 0;
  Arm sampled_ = 0;
  std::size_t active_size_ = 0;
  bool restart_pending_log_ = false;

  // prefix_[a] accumulates gap_estimate(record_t, a) over rounds.
  std::vector<PrefixSeries> prefix_;
  std::vector<EstimateRecord> records_;
  std::vector<Round> restarts_;
  std::size_t max_depth_ = 0;
  std::size_t replays_started_ = 0;
  std::vector<Arm> scratch_;
};

}  // namespace duelbench
