#include "duelbench/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

void require_condorcet(const EnvironmentTrace& trace) {
  if (!trace.condorcet_class()) {
    throw ClassError("trace contains a round without a Condorcet winner");
  }
}

// Per-phase scan state for one arm: prefix sums of the winner gap from the
// phase start, so window [s1, s2] sums to prefix[s2 - start + 1] - prefix[s1 - start].
class ArmScanner {
 public:
  ArmScanner(std::size_t k, Round start) : k_(k), start_(start), prefix_{0.0} {}

  void push(double winner_gap) { prefix_.push_back(prefix_.back() + winner_gap); }

  // Does some window [s1, s2] with start <= s1 < s2 reach the threshold, where
  // s2 is the most recently pushed round?
  bool crosses(ScanMode mode) const {
    const Round s2 = start_ + static_cast<Round>(prefix_.size()) - 2;
    if (s2 <= start_) return false;
    const double end = prefix_.back();
    auto window = [&](Round s1) { return end - prefix_[static_cast<std::size_t>(s1 - start_)]; };
    auto hits = [&](Round s1) {
      return window(s1) >= std::sqrt(static_cast<double>(k_) * static_cast<double>(s2 - s1));
    };

    if (mode == ScanMode::kApprox) {
      for (Round len = 1; s2 - len >= start_; len *= 2) {
        if (hits(s2 - len)) return true;
      }
      return hits(start_);
    }

    // Gaps are nonnegative, so no window ending at s2 sums to more than the
    // whole-phase total H; a window of length n can only qualify when
    // sqrt(K n) <= H, i.e. n <= H^2 / K.
    const double total = window(start_);
    if (total <= 0.0) return false;
    const double reach = total * total / static_cast<double>(k_);
    const Round max_len = std::min<Round>(s2 - start_, static_cast<Round>(std::floor(reach)) + 1);
    for (Round len = 1; len <= max_len; ++len) {
      if (hits(s2 - len)) return true;
    }
    return false;
  }

 private:
  std::size_t k_;
  Round start_;
  std::vector<double> prefix_;
};

}  // namespace

double significance_threshold(std::size_t k, Round s1, Round s2) {
  return std::sqrt(static_cast<double>(k) * static_cast<double>(s2 - s1));
}

bool has_significant_regret(const EnvironmentTrace& trace, Arm a, Round s1, Round s2) {
  if (s1 < 1 || s2 > trace.horizon() || s1 > s2) {
    throw ArgumentError(fmt::format("invalid interval [{}, {}]", s1, s2));
  }
  if (a >= trace.k()) throw ArgumentError(fmt::format("arm {} out of range", a + 1));
  if (s1 == s2) {
    trace.require_winner(s1);
    return false;
  }
  double sum = 0.0;
  for (Round s = s1; s <= s2; ++s) sum += trace.winner_gap(s, a);
  return sum >= significance_threshold(trace.k(), s1, s2);
}

SigShiftReport significant_shifts(const EnvironmentTrace& trace, ScanMode mode) {
  require_condorcet(trace);
  const std::size_t k = trace.k();
  const Round horizon = trace.horizon();

  SigShiftReport report;
  report.approximate = mode == ScanMode::kApprox;
  report.tau.push_back(1);

  Round start = 1;
  while (true) {
    std::vector<ArmScanner> scanners(k, ArmScanner(k, start));
    Phase phase;
    phase.start = start;
    phase.first_significant.assign(k, std::nullopt);
    std::size_t marked = 0;
    Round t = start;
    for (; t <= horizon && marked < k; ++t) {
      const auto gaps = trace.winner_gaps_of(trace.matrix_index(t));
      for (Arm a = 0; a < k; ++a) {
        scanners[a].push(gaps[a]);
        // Marks are never revoked: a qualifying window inside [start, t]
        // stays inside [start, t'] for every later t'.
        if (phase.first_significant[a]) continue;
        if (scanners[a].crosses(mode)) {
          phase.first_significant[a] = t;
          ++marked;
        }
      }
    }

    if (marked == k) {
      // The shift round is the round at which the last arm got marked; the
      // last safe arm is that arm (lowest index on ties).
      const Round shift = t - 1;
      Arm last = 0;
      for (Arm a = 0; a < k; ++a) {
        if (*phase.first_significant[a] == shift) {
          last = a;
          break;
        }
      }
      phase.end = shift - 1;
      phase.closed = true;
      phase.last_safe_arm = last;
      report.phases.push_back(std::move(phase));
      report.tau.push_back(shift);
      start = shift;
      continue;
    }

    phase.end = horizon;
    phase.closed = false;
    for (Arm a = 0; a < k; ++a) {
      if (!phase.first_significant[a]) {
        phase.last_safe_arm = a;
        break;
      }
    }
    report.phases.push_back(std::move(phase));
    break;
  }
  return report;
}

double round_regret(const EnvironmentTrace& trace, Round t, Arm i, Arm j) {
  return 0.5 * (trace.winner_gap(t, i) + trace.winner_gap(t, j));
}

double dynamic_regret(const EnvironmentTrace& trace, std::span<const std::pair<Arm, Arm>> plays) {
  if (static_cast<Round>(plays.size()) != trace.horizon()) {
    throw ArgumentError(fmt::format("dynamic_regret: {} plays for horizon {}", plays.size(),
                                    trace.horizon()));
  }
  double total = 0.0;
  for (Round t = 1; t <= trace.horizon(); ++t) {
    const auto& [i, j] = plays[static_cast<std::size_t>(t - 1)];
    total += round_regret(trace, t, i, j);
  }
  return total;
}

double cw_variation(const EnvironmentTrace& trace) {
  require_condorcet(trace);
  double total = 0.0;
  std::size_t previous = trace.matrix_index(1);
  for (Round t = 2; t <= trace.horizon(); ++t) {
    const std::size_t current = trace.matrix_index(t);
    if (current == previous) continue;
    const PreferenceMatrix& now = trace.matrices()[current];
    const PreferenceMatrix& before = trace.matrices()[previous];
    const Arm w = trace.require_winner(t);
    double worst = 0.0;
    for (Arm a = 0; a < trace.k(); ++a) worst = std::max(worst, std::abs(now(w, a) - before(w, a)));
    total += worst;
    previous = current;
  }
  return total;
}

ChangeCounts count_changes(const EnvironmentTrace& trace) {
  ChangeCounts counts;
  std::size_t previous = trace.matrix_index(1);
  for (Round t = 2; t <= trace.horizon(); ++t) {
    const std::size_t current = trace.matrix_index(t);
    if (current == previous) continue;
    const auto& m = trace.matrices();
    if (m[current].max_abs_difference(m[previous]) > PreferenceMatrix::kTolerance) {
      ++counts.matrix_changes;
    }
    if (trace.winner(t) != trace.winner(t - 1)) ++counts.winner_changes;
    previous = current;
  }
  return counts;
}

}  // namespace duelbench
