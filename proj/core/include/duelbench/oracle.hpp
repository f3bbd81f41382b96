#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "duelbench/environments.hpp"

namespace duelbench {

// How sub-interval starts are enumerated when looking for significant regret.
enum class ScanMode {
  // Every start s1 (with an exact pruning bound); the reference answer.
  kExact,
  // Only starts at dyadic offsets s2 - 2^j and the phase start. May miss
  // shifts; reports are flagged approximate.
  kApprox,
};

struct Phase {
  Round start = 1;
  // Inclusive.
  Round end = 1;
  Arm last_safe_arm = 0;
  // False for a trailing phase in which some arm never accrued significant
  // regret before the horizon.
  bool closed = false;
  // first_significant[a]: earliest round by which arm a has a sub-interval of
  // significant regret inside this phase.
  std::vector<std::optional<Round>> first_significant;
};

struct SigShiftReport {
  // tau[0] = 1, followed by every significant shift round.
  std::vector<Round> tau;
  std::vector<Phase> phases;
  bool approximate = false;

  std::size_t sig_count() const { return tau.empty() ? 0 : tau.size() - 1; }
};

// Significance threshold sqrt(K * (s2 - s1)).
double significance_threshold(std::size_t k, Round s1, Round s2);

// True iff sum_{s=s1}^{s2} delta_s(a*_s, a) >= sqrt(K (s2 - s1)). Single-round
// windows (s1 == s2) are never significant: the threshold there is 0 and
// every arm, the winner included, would qualify.
bool has_significant_regret(const EnvironmentTrace& trace, Arm a, Round s1, Round s2);

// Significant Condorcet-winner switches of the whole trace.
SigShiftReport significant_shifts(const EnvironmentTrace& trace, ScanMode mode = ScanMode::kExact);

// Regret of playing (i, j) at round t: (delta_t(a*, i) + delta_t(a*, j)) / 2.
double round_regret(const EnvironmentTrace& trace, Round t, Arm i, Arm j);

// Dynamic regret of a full play sequence; plays[t-1] is the pair of round t.
double dynamic_regret(const EnvironmentTrace& trace, std::span<const std::pair<Arm, Arm>> plays);

// V_T = sum_{t>=2} max_a |P_t(a*_t, a) - P_{t-1}(a*_t, a)|.
double cw_variation(const EnvironmentTrace& trace);

struct ChangeCounts {
  // Rounds t with P_t != P_{t+1} (any entry differing by more than 1e-12).
  std::size_t matrix_changes = 0;
  // Rounds t with a*_t != a*_{t+1}.
  std::size_t winner_changes = 0;
};

ChangeCounts count_changes(const EnvironmentTrace& trace);

}  // namespace duelbench
