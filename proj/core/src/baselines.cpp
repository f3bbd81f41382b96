#include "duelbench/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "duelbench/errors.hpp"

namespace duelbench {

InterleavedFiltering::InterleavedFiltering(Round horizon, std::size_t k, double delta,
                                           RngStream rng)
    : Policy(horizon, k),
      delta_(delta > 0.0 ? delta
                         : 1.0 / (static_cast<double>(horizon) * static_cast<double>(k * k))),
      log_inv_delta_(std::log(1.0 / delta_)),
      rng_(std::move(rng)),
      wins_(k, 0),
      duels_(k, 0) {
  if (!(delta_ < 1.0)) throw ArgumentError("IF confidence delta must be below 1");
  candidate_ = static_cast<Arm>(rng_.uniform_index(k));
  for (Arm a = 0; a < k; ++a) {
    if (a != candidate_) working_.push_back(a);
  }
}

double InterleavedFiltering::mean(Arm b) const {
  return static_cast<double>(wins_[b]) / static_cast<double>(duels_[b]);
}

double InterleavedFiltering::radius(Arm b) const {
  return std::sqrt(log_inv_delta_ / static_cast<double>(duels_[b]));
}

std::pair<Arm, Arm> InterleavedFiltering::do_select(Round /*t*/) {
  if (working_.empty()) return {candidate_, candidate_};
  return {candidate_, working_[cursor_]};
}

void InterleavedFiltering::do_observe(Round /*t*/, const DuelOutcome& outcome) {
  if (working_.empty()) return;
  const Arm b = outcome.second;
  ++duels_[b];
  wins_[b] += outcome.first_won ? 1 : 0;
  if (++cursor_ == working_.size()) end_of_sweep();
}

void InterleavedFiltering::end_of_sweep() {
  cursor_ = 0;
  std::erase_if(working_, [&](Arm b) { return mean(b) - radius(b) > 0.5; });

  // The challenger that beats the candidate by the widest margin; lowest
  // index on ties.
  std::optional<Arm> challenger;
  for (Arm b : working_) {
    if (mean(b) + radius(b) < 0.5 && (!challenger || mean(b) < mean(*challenger))) challenger = b;
  }
  if (!challenger) return;

  std::erase_if(working_, [&](Arm b) { return b != *challenger && mean(b) > 0.5; });
  candidate_ = *challenger;
  std::erase(working_, *challenger);
  std::fill(wins_.begin(), wins_.end(), 0);
  std::fill(duels_.begin(), duels_.end(), 0);
}

RandDuel::RandDuel(Round horizon, std::size_t k, RngStream rng)
    : Policy(horizon, k), rng_(std::move(rng)) {}

std::pair<Arm, Arm> RandDuel::do_select(Round /*t*/) {
  const auto i = static_cast<Arm>(rng_.uniform_index(k()));
  const auto j = static_cast<Arm>(rng_.uniform_index(k()));
  return {i, j};
}

}  // namespace duelbench
