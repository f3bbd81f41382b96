#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "duelbench/preference.hpp"

namespace duelbench {

// Which windows [s1, s2] the eviction and switching tests look at.
enum class IntervalMode {
  // Every start, located with a pruned segment-tree descent.
  kExact,
  // Every start, by a linear scan. Reference for kExact; O(t) per query.
  kExhaustive,
  // Starts at s2 - 2^j, the lower limit, and any caller-supplied anchors.
  kDyadic,
};

// Prefix sums E(0) = 0, E(s) = E(s-1) + x_s of a per-round series, with
// range minimum and maximum over E maintained in a segment tree.
class PrefixSeries {
 public:
  // Room for rounds 1..capacity.
  explicit PrefixSeries(std::size_t capacity);

  void append(double x);
  // Index of the latest prefix (number of appended rounds).
  Round last() const { return static_cast<Round>(values_.size()) - 1; }
  double value(Round s) const { return values_[static_cast<std::size_t>(s)]; }
  // Sum of x over rounds [s1, s2].
  double window_sum(Round s1, Round s2) const { return value(s2) - value(s1 - 1); }

  double min_node(std::size_t node) const { return min_[node]; }
  double max_node(std::size_t node) const { return max_[node]; }
  std::size_t leaves() const { return leaves_; }

 private:
  std::size_t leaves_;
  std::vector<double> values_;
  std::vector<double> min_;
  std::vector<double> max_;
};

// C * log(T) * sqrt(max(K * n, K^2)) for a window with s2 - s1 = n.
class WindowThreshold {
 public:
  WindowThreshold(double c, Round horizon, std::size_t k);
  double operator()(Round n) const;

 private:
  double scale_;
  double k_;
};

enum class Direction {
  // Window statistic is sum of x over [s1, s2].
  kUp,
  // Window statistic is minus that sum.
  kDown,
};

struct Crossing {
  Round start = 0;
  // Window statistic minus threshold (>= 0).
  double exceedance = 0.0;
};

// Latest start s1 in [lo, s2) whose window [s1, s2] statistic reaches the
// threshold, or nullopt. In kDyadic mode only the grid starts are examined,
// so a hit there is always a hit under kExact.
std::optional<Crossing> latest_crossing(const PrefixSeries& series, Direction dir, Round lo,
                                        Round s2, const WindowThreshold& threshold,
                                        IntervalMode mode, std::span<const Round> anchors = {});

}  // namespace duelbench
