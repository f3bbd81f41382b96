#include "duelbench/swift.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "duelbench/errors.hpp"

namespace duelbench {

double gap_estimate(const EstimateRecord& record, Arm a) {
  const double hit = record.sampled == a && record.outcome ? 1.0 : 0.0;
  return static_cast<double>(record.active_size) * hit - 0.5;
}

std::vector<std::int64_t> replay_lengths(Round horizon) {
  std::vector<std::int64_t> lengths;
  const auto top = static_cast<std::int64_t>(
      std::bit_ceil(static_cast<std::uint64_t>(std::max<Round>(horizon, 2))));
  for (std::int64_t m = 2; m <= top; m *= 2) lengths.push_back(m);
  return lengths;
}

double replay_probability(Round s, Round episode_start, std::int64_t m) {
  if (s <= episode_start || m < 1) throw ArgumentError("replay_probability: s must follow the episode start");
  return 1.0 / std::sqrt(static_cast<double>(m) * static_cast<double>(s - episode_start));
}

MetaSwift::MetaSwift(Round horizon, std::size_t k, SwiftConfig config, std::uint64_t seed,
                     std::uint64_t trial)
    : Policy(horizon, k),
      config_(std::move(config)),
      seed_(seed),
      trial_(trial),
      rng_(seed, StreamKey{trial, Purpose::kPolicy, 0}),
      threshold_(config_.c, horizon, k),
      switch_threshold_(config_.c_switch > 0.0 ? config_.c_switch : config_.c, horizon, k),
      lengths_(replay_lengths(horizon)) {
  if (!(config_.c > 0.0)) throw ArgumentError("METASWIFT constant C must be positive");
  prefix_.reserve(k);
  for (Arm a = 0; a < k; ++a) prefix_.emplace_back(static_cast<std::size_t>(horizon));
  records_.reserve(static_cast<std::size_t>(horizon));
  start_episode(1);
}

void MetaSwift::push_instance(Round start, std::int64_t duration) {
  stack_.push_back(Instance{start, duration, std::vector<char>(k(), 0)});
  max_depth_ = std::max(max_depth_, stack_.size());
  candidate_ = static_cast<Arm>(rng_.uniform_index(k()));
}

void MetaSwift::start_episode(Round t) {
  stack_.clear();
  if (t > 1) {
    ++episode_;
    restarts_.push_back(t);
    restart_pending_log_ = true;
  }
  push_instance(t, horizon() + 1 - t);
}

std::vector<Arm> MetaSwift::active_set() const {
  std::vector<Arm> out;
  const auto& top = stack_.back();
  for (Arm a = 0; a < k(); ++a) {
    if (!top.evicted[a]) out.push_back(a);
  }
  return out;
}

std::vector<Arm> MetaSwift::master_set() const {
  std::vector<Arm> out;
  const auto& root = stack_.front();
  for (Arm a = 0; a < k(); ++a) {
    if (!root.evicted[a]) out.push_back(a);
  }
  return out;
}

std::pair<Arm, Arm> MetaSwift::do_select(Round /*t*/) {
  const auto& top = stack_.back();
  scratch_.clear();
  for (Arm a = 0; a < k(); ++a) {
    if (!top.evicted[a]) scratch_.push_back(a);
  }
  // An empty active set implies an empty master set, which restarts the
  // episode before the next selection.
  if (scratch_.empty()) throw std::logic_error("METASWIFT: empty active set at selection");
  active_size_ = scratch_.size();
  sampled_ = scratch_[rng_.uniform_index(scratch_.size())];
  return {candidate_, sampled_};
}

void MetaSwift::do_observe(Round t, const DuelOutcome& outcome) {
  const EstimateRecord record{t, candidate_, sampled_, active_size_, outcome.first_won};
  records_.push_back(record);
  for (Arm a = 0; a < k(); ++a) prefix_[a].append(gap_estimate(record, a));

  if (log_enabled()) {
    std::size_t master = 0;
    for (Arm a = 0; a < k(); ++a) master += !stack_.front().evicted[a];
    append_log(RoundLog{t, episode_, stack_.size(), candidate_, sampled_, active_size_, master,
                        outcome.first_won, restart_pending_log_});
  }
  restart_pending_log_ = false;

  if (t < horizon()) between_rounds(t + 1);
}

std::int64_t MetaSwift::scheduled_replay(Round s) const {
  const Round episode_start = stack_.front().start;
  if (config_.schedule) return config_.schedule(episode_, episode_start, s);
  std::int64_t chosen = 0;
  for (std::int64_t m : lengths_) {
    const double u = keyed_uniform(
        seed_, {trial_, static_cast<std::uint64_t>(Purpose::kSchedule), episode_,
                static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(m)});
    if (u < replay_probability(s, episode_start, m)) chosen = m;
  }
  return chosen;
}

void MetaSwift::refresh_evictions(Round s2) {
  std::vector<Round> anchors;
  if (config_.interval_mode == IntervalMode::kDyadic) {
    for (const auto& inst : stack_) anchors.push_back(inst.start);
  }
  for (Arm a = 0; a < k(); ++a) {
    Round lo = 0;
    for (const auto& inst : stack_) {
      if (!inst.evicted[a] && (lo == 0 || inst.start < lo)) lo = inst.start;
    }
    if (lo == 0) continue;
    const auto hit =
        latest_crossing(prefix_[a], Direction::kUp, lo, s2, threshold_, config_.interval_mode, anchors);
    if (!hit) continue;
    for (auto& inst : stack_) {
      if (inst.start <= hit->start) inst.evicted[a] = 1;
    }
  }
}

std::optional<Arm> MetaSwift::switch_target(const Instance& top, Round s2) const {
  std::optional<Arm> best;
  double best_margin = 0.0;
  const Round anchor[] = {top.start};
  for (Arm a = 0; a < k(); ++a) {
    if (top.evicted[a] || a == candidate_) continue;
    const auto hit = latest_crossing(prefix_[a], Direction::kDown, top.start, s2, switch_threshold_,
                                     config_.interval_mode, anchor);
    if (hit && (!best || hit->exceedance > best_margin)) {
      best = a;
      best_margin = hit->exceedance;
    }
  }
  return best;
}

void MetaSwift::between_rounds(Round next) {
  const Round last = next - 1;
  refresh_evictions(last);

  if (config_.replays) {
    if (const std::int64_t m = scheduled_replay(next); m > 0) {
      ++replays_started_;
      push_instance(next, m);
      return;
    }
  }

  // Instances whose duration ran out return to their parent. The root's
  // duration covers the rest of the horizon.
  while (stack_.size() > 1 && next > stack_.back().start + stack_.back().duration) {
    stack_.pop_back();
  }

  const auto& root = stack_.front();
  if (std::all_of(root.evicted.begin(), root.evicted.end(), [](char e) { return e != 0; })) {
    start_episode(next);
    return;
  }

  if (const auto target = switch_target(stack_.back(), last)) candidate_ = *target;
}

}  // namespace duelbench
