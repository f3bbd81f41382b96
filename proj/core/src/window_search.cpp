#include "duelbench/window_search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Query {
  const PrefixSeries& series;
  Direction dir;
  Round s2;
  double end;
  const WindowThreshold& threshold;

  // Statistic of window [j + 1, s2] minus its threshold.
  double margin(Round j) const {
    const double sum = end - series.value(j);
    const double stat = dir == Direction::kUp ? sum : -sum;
    return stat - threshold(s2 - j - 1);
  }
};

// Largest prefix index j in [ql, qr] with margin(j) >= 0, searched right to
// left. A node is skipped when even its most favourable prefix value cannot
// beat the smallest threshold any window in the node could face.
std::optional<Round> descend(const Query& q, std::size_t node, Round nl, Round nr, Round ql,
                             Round qr) {
  if (nr < ql || nl > qr) return std::nullopt;
  const Round b = std::min(nr, qr);
  const double easiest = q.threshold(q.s2 - b - 1);
  if (q.dir == Direction::kUp) {
    if (q.end - q.series.min_node(node) < easiest) return std::nullopt;
  } else {
    if (q.series.max_node(node) - q.end < easiest) return std::nullopt;
  }
  if (nl == nr) {
    if (q.margin(nl) >= 0.0) return nl;
    return std::nullopt;
  }
  const Round mid = nl + (nr - nl) / 2;
  if (auto r = descend(q, 2 * node + 1, mid + 1, nr, ql, qr)) return r;
  return descend(q, 2 * node, nl, mid, ql, qr);
}

}  // namespace

PrefixSeries::PrefixSeries(std::size_t capacity)
    : leaves_(std::bit_ceil(capacity + 1)),
      min_(2 * leaves_, kInf),
      max_(2 * leaves_, -kInf) {
  values_.reserve(capacity + 1);
  values_.push_back(0.0);
  min_[leaves_] = max_[leaves_] = 0.0;
  for (std::size_t n = leaves_ / 2; n >= 1; n /= 2) {
    min_[n] = std::min(min_[2 * n], min_[2 * n + 1]);
    max_[n] = std::max(max_[2 * n], max_[2 * n + 1]);
  }
}

void PrefixSeries::append(double x) {
  if (values_.size() >= leaves_) throw ArgumentError("PrefixSeries capacity exceeded");
  const double v = values_.back() + x;
  std::size_t n = leaves_ + values_.size();
  values_.push_back(v);
  min_[n] = max_[n] = v;
  for (n /= 2; n >= 1; n /= 2) {
    min_[n] = std::min(min_[2 * n], min_[2 * n + 1]);
    max_[n] = std::max(max_[2 * n], max_[2 * n + 1]);
  }
}

WindowThreshold::WindowThreshold(double c, Round horizon, std::size_t k)
    : scale_(c * std::log(static_cast<double>(std::max<Round>(horizon, 2)))),
      k_(static_cast<double>(k)) {}

double WindowThreshold::operator()(Round n) const {
  return scale_ * std::sqrt(std::max(k_ * static_cast<double>(n), k_ * k_));
}

std::optional<Crossing> latest_crossing(const PrefixSeries& series, Direction dir, Round lo,
                                        Round s2, const WindowThreshold& threshold,
                                        IntervalMode mode, std::span<const Round> anchors) {
  if (lo < 1 || s2 > series.last()) throw ArgumentError("latest_crossing: window out of range");
  if (s2 <= lo) return std::nullopt;
  const Query q{series, dir, s2, series.value(s2), threshold};
  auto found = [&](Round j) { return Crossing{j + 1, q.margin(j)}; };

  switch (mode) {
    case IntervalMode::kExact: {
      const auto leaves = static_cast<Round>(series.leaves());
      if (auto j = descend(q, 1, 0, leaves - 1, lo - 1, s2 - 2)) return found(*j);
      return std::nullopt;
    }
    case IntervalMode::kExhaustive: {
      for (Round j = s2 - 2; j >= lo - 1; --j) {
        if (q.margin(j) >= 0.0) return found(j);
      }
      return std::nullopt;
    }
    case IntervalMode::kDyadic: {
      std::optional<Round> best;
      auto consider = [&](Round s1) {
        if (s1 < lo || s1 >= s2 || (best && s1 <= *best)) return;
        if (q.margin(s1 - 1) >= 0.0) best = s1;
      };
      for (Round len = 1; s2 - len >= lo; len *= 2) consider(s2 - len);
      consider(lo);
      for (Round a : anchors) consider(a);
      if (best) return found(*best - 1);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace duelbench
