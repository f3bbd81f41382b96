#include "duelbench/policy.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "duelbench/errors.hpp"

namespace duelbench {

Policy::Policy(Round horizon, std::size_t k) : horizon_(horizon), k_(k) {
  if (horizon < 1) throw ArgumentError("policy horizon must be at least 1");
  if (k < 1) throw ArgumentError("policy needs at least one arm");
}

std::pair<Arm, Arm> Policy::select_pair(Round t) {
  if (awaiting_observation_ || t != next_round_ || t > horizon_) {
    throw std::logic_error(fmt::format("{}: select_pair({}) out of protocol order", name(), t));
  }
  pending_ = do_select(t);
  awaiting_observation_ = true;
  return pending_;
}

void Policy::observe(Round t, const DuelOutcome& outcome) {
  if (!awaiting_observation_ || t != next_round_) {
    throw std::logic_error(fmt::format("{}: observe({}) out of protocol order", name(), t));
  }
  if (outcome.first != pending_.first || outcome.second != pending_.second) {
    throw std::logic_error(fmt::format("{}: outcome for a pair that was not selected", name()));
  }
  awaiting_observation_ = false;
  ++next_round_;
  do_observe(t, outcome);
}

void write_round_log_header(std::ostream& out) {
  out << "t\tepisode\tstack_depth\tcandidate\tsampled_arm\tactive_set_size\tmaster_set_size\t"
         "outcome\trestart_flag\n";
}

void write_round_log(std::ostream& out, const RoundLog& r) {
  out << r.t << '\t' << r.episode << '\t' << r.stack_depth << '\t' << r.candidate + 1 << '\t'
      << r.sampled_arm + 1 << '\t' << r.active_set_size << '\t' << r.master_set_size << '\t'
      << (r.outcome ? 1 : 0) << '\t' << (r.restart ? 1 : 0) << '\n';
}

}  // namespace duelbench
