#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "duelbench/policy.hpp"
#include "duelbench/rng.hpp"

namespace duelbench {

// Interleaved Filtering for stationary dueling bandits.
//
// Keeps a candidate and a working set W. Each sweep duels the candidate once
// against every arm of W (one arm per round). After a sweep, with
// n comparisons against b and confidence radius c = sqrt(log(1/delta) / n):
//   - b leaves W when p(candidate beats b) - c > 1/2;
//   - if some b' beats the candidate (p + c < 1/2), every b with p > 1/2 is
//     pruned, b' becomes the candidate, leaves W, and all estimates reset.
// Once W is empty the candidate is played against itself.
//
// These internals follow the stationary IF literature; they are the tuning
// surface for this baseline.
class InterleavedFiltering : public Policy {
 public:
  // delta <= 0 selects the default 1 / (T K^2).
  InterleavedFiltering(Round horizon, std::size_t k, double delta, RngStream rng);

  std::string name() const override { return "if"; }

  Arm candidate() const { return candidate_; }
  const std::vector<Arm>& working_set() const { return working_; }
  double delta() const { return delta_; }

 protected:
  std::pair<Arm, Arm> do_select(Round t) override;
  void do_observe(Round t, const DuelOutcome& outcome) override;

 private:
  void end_of_sweep();
  double radius(Arm b) const;
  double mean(Arm b) const;

  double delta_;
  double log_inv_delta_;
  RngStream rng_;
  Arm candidate_ = 0;
  std::vector<Arm> working_;
  std::size_t cursor_ = 0;
  std::vector<std::uint64_t> wins_;
  std::vector<std::uint64_t> duels_;
};

// Both arms drawn independently and uniformly every round.
class RandDuel : public Policy {
 public:
  RandDuel(Round horizon, std::size_t k, RngStream rng);
  std::string name() const override { return "randduel"; }

 protected:
  std::pair<Arm, Arm> do_select(Round t) override;
  void do_observe(Round, const DuelOutcome&) override {}

 private:
  RngStream rng_;
};

}  // namespace duelbench
