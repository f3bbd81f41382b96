#include "duelbench/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

constexpr double kTol = PreferenceMatrix::kTolerance;

PreferenceMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> entries;
  for (const auto& r : rows) entries.insert(entries.end(), r.begin(), r.end());
  return PreferenceMatrix(rows.size(), std::move(entries));
}

PreferenceMatrix swap_arms(const PreferenceMatrix& p, Arm a, Arm b) {
  const std::size_t k = p.k();
  auto relabel = [&](Arm x) { return x == a ? b : (x == b ? a : x); };
  std::vector<double> entries(k * k);
  for (Arm i = 0; i < k; ++i) {
    for (Arm j = 0; j < k; ++j) entries[relabel(i) * k + relabel(j)] = p(i, j);
  }
  return PreferenceMatrix(k, std::move(entries));
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ArgumentError(fmt::format("epsilon must lie in (0, 1/2), got {}", epsilon));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Arm> condorcet_winner(const PreferenceMatrix& p) {
  for (Arm a = 0; a < p.k(); ++a) {
    bool beats_all = true;
    for (Arm b = 0; b < p.k() && beats_all; ++b) beats_all = p(a, b) - 0.5 >= -kTol;
    if (beats_all) return a;
  }
  return std::nullopt;
}

std::vector<Arm> copeland_order(const PreferenceMatrix& p) {
  const std::size_t k = p.k();
  std::vector<std::size_t> wins(k, 0);
  for (Arm i = 0; i < k; ++i) {
    for (Arm j = 0; j < k; ++j) wins[i] += p(i, j) > 0.5 + kTol;
  }
  std::vector<Arm> order(k);
  std::iota(order.begin(), order.end(), Arm{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Arm a, Arm b) { return wins[a] > wins[b]; });
  return order;
}

bool sst_holds(const PreferenceMatrix& p, std::span<const Arm> order) {
  const std::size_t k = order.size();
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x; y < k; ++y) {
      for (std::size_t z = y; z < k; ++z) {
        const Arm i = order[x], j = order[y], l = order[z];
        const double d_il = p(i, l) - 0.5;
        if (d_il + kTol < std::max(p(i, j) - 0.5, p(j, l) - 0.5)) return false;
      }
    }
  }
  return true;
}

bool sti_holds(const PreferenceMatrix& p, std::span<const Arm> order) {
  const std::size_t k = order.size();
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x; y < k; ++y) {
      for (std::size_t z = y; z < k; ++z) {
        const Arm i = order[x], j = order[y], l = order[z];
        if (p(i, l) - 0.5 > (p(i, j) - 0.5) + (p(j, l) - 0.5) + kTol) return false;
      }
    }
  }
  return true;
}

ClassReport validate_class(const PreferenceMatrix& p) {
  constexpr std::size_t kExhaustiveLimit = 8;
  ClassReport report;
  report.has_cw = condorcet_winner(p).has_value();

  std::vector<Arm> order = copeland_order(p);
  std::optional<std::vector<Arm>> sst_order;
  if (sst_holds(p, order)) {
    sst_order = order;
  } else if (p.k() <= kExhaustiveLimit) {
    std::vector<Arm> perm(p.k());
    std::iota(perm.begin(), perm.end(), Arm{0});
    do {
      if (sst_holds(p, perm)) {
        sst_order = perm;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    report.order_is_heuristic = true;
  }

  if (sst_order) {
    report.satisfies_sst = true;
    report.ordering = *sst_order;
    report.checked_order = *sst_order;
  } else {
    report.checked_order = order;
    report.order_is_heuristic = true;
  }
  report.satisfies_sti = sti_holds(p, report.checked_order);
  return report;
}

// ---------------------------------------------------------------------------

PreferenceMatrix geometric_btl(std::size_t k, std::span<const std::size_t> ranking) {
  if (ranking.size() != k) throw ArgumentError("ranking length differs from k");
  std::vector<bool> seen(k + 1, false);
  for (std::size_t r : ranking) {
    if (r < 1 || r > k || seen[r]) throw ArgumentError("ranking is not a permutation of 1..k");
    seen[r] = true;
  }
  std::vector<double> entries(k * k);
  for (Arm i = 0; i < k; ++i) {
    for (Arm j = 0; j < k; ++j) {
      const double wi = std::ldexp(1.0, -static_cast<int>(ranking[i]));
      const double wj = std::ldexp(1.0, -static_cast<int>(ranking[j]));
      entries[i * k + j] = i == j ? 0.5 : wi / (wi + wj);
    }
  }
  // Division rounding can leave P(i,j) + P(j,i) one ulp away from 1; take the
  // upper triangle as authoritative.
  for (Arm i = 0; i < k; ++i) {
    for (Arm j = 0; j < i; ++j) entries[i * k + j] = 1.0 - entries[j * k + i];
  }
  return PreferenceMatrix(k, std::move(entries));
}

std::vector<std::size_t> identity_ranking(std::size_t k) {
  std::vector<std::size_t> r(k);
  std::iota(r.begin(), r.end(), std::size_t{1});
  return r;
}

std::vector<std::size_t> reversed_ranking(std::size_t k) {
  std::vector<std::size_t> r(k);
  for (std::size_t a = 0; a < k; ++a) r[a] = k - a;
  return r;
}

PreferenceMatrix lower_bound_plus(double e) {
  check_epsilon(e);
  return from_rows({{0.5, 0.5 + e, 1.0}, {0.5 - e, 0.5, 0.5 + e}, {0.0, 0.5 - e, 0.5}});
}

PreferenceMatrix lower_bound_minus(double e) {
  check_epsilon(e);
  return from_rows({{0.5, 0.5 - e, 0.0}, {0.5 + e, 0.5, 0.5 - e}, {1.0, 0.5 + e, 0.5}});
}

PreferenceMatrix sst_violating_plus(double e) {
  check_epsilon(e);
  return from_rows({{0.5, 0.5 - e, 0.5 - e}, {0.5 + e, 0.5, 0.0}, {0.5 + e, 1.0, 0.5}});
}

PreferenceMatrix sst_violating_minus(double e) { return swap_arms(sst_violating_plus(e), 1, 2); }

// ---------------------------------------------------------------------------

EnvironmentTrace::EnvironmentTrace(Round horizon, std::vector<PreferenceMatrix> table,
                                   std::variant<Explicit, Segments, Mixture> provider)
    : horizon_(horizon), k_(0), table_(std::move(table)), provider_(std::move(provider)) {
  if (horizon_ < 1) throw ArgumentError("trace horizon must be at least 1");
  if (table_.empty()) throw ArgumentError("trace has no matrices");
  k_ = table_.front().k();
  winners_.reserve(table_.size());
  winner_gaps_.assign(table_.size() * k_, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < table_.size(); ++m) {
    if (table_[m].k() != k_) throw ArgumentError("trace mixes matrices of different size");
    winners_.push_back(condorcet_winner(table_[m]));
    if (winners_.back()) {
      for (Arm a = 0; a < k_; ++a) winner_gaps_[m * k_ + a] = table_[m](*winners_.back(), a) - 0.5;
    }
  }
}

EnvironmentTrace EnvironmentTrace::from_matrices(std::vector<PreferenceMatrix> per_round) {
  const auto horizon = static_cast<Round>(per_round.size());
  return EnvironmentTrace(horizon, std::move(per_round), Explicit{});
}

EnvironmentTrace EnvironmentTrace::piecewise(
    Round horizon, std::vector<std::pair<Round, PreferenceMatrix>> segments) {
  if (segments.empty() || segments.front().first != 1) {
    throw ArgumentError("piecewise trace must have a segment starting at round 1");
  }
  Segments provider;
  std::vector<PreferenceMatrix> table;
  Round previous = 0;
  for (auto& [start, matrix] : segments) {
    if (start <= previous || start > horizon) {
      throw ArgumentError(fmt::format("segment start {} not increasing or beyond horizon", start));
    }
    previous = start;
    provider.list.push_back(Segment{start, table.size()});
    table.push_back(std::move(matrix));
  }
  return EnvironmentTrace(horizon, std::move(table), std::move(provider));
}

EnvironmentTrace EnvironmentTrace::mixture(Round horizon, PreferenceMatrix plus,
                                           PreferenceMatrix minus, std::uint64_t seed,
                                           StreamKey key) {
  std::vector<PreferenceMatrix> table;
  table.push_back(std::move(plus));
  table.push_back(std::move(minus));
  return EnvironmentTrace(horizon, std::move(table), Mixture{seed, key});
}

void EnvironmentTrace::check_round(Round t) const {
  if (t < 1 || t > horizon_) {
    throw ArgumentError(fmt::format("round {} outside [1, {}]", t, horizon_));
  }
}

std::size_t EnvironmentTrace::matrix_index(Round t) const {
  check_round(t);
  return std::visit(
      [&](const auto& p) -> std::size_t {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Explicit>) {
          return static_cast<std::size_t>(t - 1);
        } else if constexpr (std::is_same_v<P, Segments>) {
          auto it = std::upper_bound(p.list.begin(), p.list.end(), t,
                                     [](Round r, const Segment& s) { return r < s.start; });
          return std::prev(it)->matrix;
        } else {
          const double u = keyed_uniform(
              p.seed, {p.key.trial, static_cast<std::uint64_t>(p.key.purpose),
                       p.key.round, static_cast<std::uint64_t>(t)});
          return u < 0.5 ? 0 : 1;
        }
      },
      provider_);
}

Arm EnvironmentTrace::require_winner(Round t) const {
  const auto w = winner(t);
  if (!w) throw ClassError(fmt::format("round {} has no Condorcet winner", t));
  return *w;
}

double EnvironmentTrace::winner_gap(Round t, Arm a) const {
  const std::size_t m = matrix_index(t);
  if (!winners_[m]) throw ClassError(fmt::format("round {} has no Condorcet winner", t));
  if (a >= k_) throw ArgumentError(fmt::format("arm {} out of range", a + 1));
  return winner_gaps_[m * k_ + a];
}

bool EnvironmentTrace::condorcet_class() const {
  return std::all_of(winners_.begin(), winners_.end(), [](const auto& w) { return w.has_value(); });
}

const std::vector<EnvironmentTrace::Segment>& EnvironmentTrace::segments() const {
  const auto* s = std::get_if<Segments>(&provider_);
  if (!s) throw ArgumentError("trace is not piecewise constant");
  return s->list;
}

// ---------------------------------------------------------------------------

EnvironmentTrace switching_btl_trace(std::size_t k, Round horizon,
                                     std::span<const Round> changepoints, RngStream& rng) {
  Round previous = 1;
  for (Round cp : changepoints) {
    if (cp <= previous || cp > horizon) {
      throw ArgumentError(fmt::format(
          "changepoints must be strictly increasing within (1, {}]; got {}", horizon, cp));
    }
    previous = cp;
  }
  std::vector<std::pair<Round, PreferenceMatrix>> segments;
  std::vector<std::size_t> ranking = identity_ranking(k);
  segments.emplace_back(1, geometric_btl(k, ranking));
  for (Round cp : changepoints) {
    // Fisher-Yates with the stream's own integer draws.
    for (std::size_t i = k; i > 1; --i) {
      std::swap(ranking[i - 1], ranking[rng.uniform_index(i)]);
    }
    segments.emplace_back(cp, geometric_btl(k, ranking));
  }
  return EnvironmentTrace::piecewise(horizon, std::move(segments));
}

EnvironmentTrace condorcet_lower_bound_trace(Round horizon, double epsilon, const RngStream& rng) {
  return EnvironmentTrace::mixture(horizon, lower_bound_plus(epsilon), lower_bound_minus(epsilon),
                                   rng.master_seed(), rng.key());
}

EnvironmentTrace sst_violating_trace(Round horizon, double epsilon, const RngStream& rng) {
  return EnvironmentTrace::mixture(horizon, sst_violating_plus(epsilon),
                                   sst_violating_minus(epsilon), rng.master_seed(), rng.key());
}

EnvironmentTrace btl_flip_trace(std::size_t k, Round horizon, Round flip_round) {
  if (flip_round <= 1 || flip_round > horizon) {
    throw ArgumentError("flip round must lie in (1, horizon]");
  }
  std::vector<std::pair<Round, PreferenceMatrix>> segments;
  segments.emplace_back(1, geometric_btl(k, identity_ranking(k)));
  segments.emplace_back(flip_round, geometric_btl(k, reversed_ranking(k)));
  return EnvironmentTrace::piecewise(horizon, std::move(segments));
}

}  // namespace duelbench
