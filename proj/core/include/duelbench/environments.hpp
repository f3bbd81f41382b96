#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "duelbench/preference.hpp"
#include "duelbench/rng.hpp"

namespace duelbench {

// ---------------------------------------------------------------------------
// Preference-class membership

struct ClassReport {
  bool has_cw = false;
  bool satisfies_sst = false;
  bool satisfies_sti = false;
  // Best-first order over arms; present only when SST holds.
  std::optional<std::vector<Arm>> ordering;
  // Order used for the STI check (the SST order when SST holds, otherwise the
  // Copeland order).
  std::vector<Arm> checked_order;
  // Set when the verdict rests on the Copeland heuristic order rather than on
  // an exhaustive search (SST failed and K > 8, or STI checked without SST).
  bool order_is_heuristic = false;
};

// Lowest-indexed arm a with gap(P, a, b) >= 0 for every b, if any.
std::optional<Arm> condorcet_winner(const PreferenceMatrix& p);

// Arms sorted by number of strict wins (P(i,j) > 1/2), descending; ties by index.
std::vector<Arm> copeland_order(const PreferenceMatrix& p);

// Checks strong stochastic transitivity of `order` (best first) over all
// triples i >= j >= k: delta(i,k) >= max(delta(i,j), delta(j,k)).
bool sst_holds(const PreferenceMatrix& p, std::span<const Arm> order);

// Checks the stochastic triangle inequality delta(i,k) <= delta(i,j) +
// delta(j,k) for all triples i >= j >= k under `order`.
bool sti_holds(const PreferenceMatrix& p, std::span<const Arm> order);

ClassReport validate_class(const PreferenceMatrix& p);

// ---------------------------------------------------------------------------
// Matrix families

// Geometric Bradley-Terry-Luce model. ranking[a] is the 1-based rank of arm a;
// arms of rank r_i, r_j meet with P = 2^-r_i / (2^-r_i + 2^-r_j).
PreferenceMatrix geometric_btl(std::size_t k, std::span<const std::size_t> ranking);
std::vector<std::size_t> identity_ranking(std::size_t k);
std::vector<std::size_t> reversed_ranking(std::size_t k);

// The two 3-arm matrices mixed by the Condorcet lower-bound adversary:
// arm 1 wins in the "plus" matrix, arm 3 in the "minus" matrix, and arm 2 is
// always within epsilon of the winner. SST holds, STI fails.
PreferenceMatrix lower_bound_plus(double epsilon);
PreferenceMatrix lower_bound_minus(double epsilon);

// The SST-violating variant: arm 1 trails the winner by exactly epsilon while
// arms 2 and 3 alternate between best and worst. STI holds, SST fails.
PreferenceMatrix sst_violating_plus(double epsilon);
PreferenceMatrix sst_violating_minus(double epsilon);

// ---------------------------------------------------------------------------
// Traces

// A horizon-length sequence of preference matrices. Distinct matrices live in
// a small table; each round maps to a table index through one of three
// providers (explicit list, piecewise-constant segments, or a seeded
// per-round coin between two matrices). Immutable after construction.
class EnvironmentTrace {
 public:
  struct Segment {
    Round start = 1;
    std::size_t matrix = 0;
  };

  static EnvironmentTrace from_matrices(std::vector<PreferenceMatrix> per_round);
  // `segments` must start at round 1 with strictly increasing starts <= horizon.
  static EnvironmentTrace piecewise(Round horizon,
                                    std::vector<std::pair<Round, PreferenceMatrix>> segments);
  // Round t uses `plus` when keyed_uniform(seed, key with round t) < 1/2,
  // otherwise `minus`.
  static EnvironmentTrace mixture(Round horizon, PreferenceMatrix plus, PreferenceMatrix minus,
                                  std::uint64_t seed, StreamKey key);

  Round horizon() const { return horizon_; }
  std::size_t k() const { return k_; }

  std::size_t matrix_index(Round t) const;
  const PreferenceMatrix& at(Round t) const { return table_[matrix_index(t)]; }
  std::span<const PreferenceMatrix> matrices() const { return table_; }

  std::optional<Arm> winner(Round t) const { return winners_[matrix_index(t)]; }
  // Throws ClassError when round t has no Condorcet winner.
  Arm require_winner(Round t) const;
  // delta_t(a*_t, a); throws ClassError when round t has no Condorcet winner.
  double winner_gap(Round t, Arm a) const;
  // Winner gaps of table entry m by arm (NaN when that matrix has no CW).
  std::span<const double> winner_gaps_of(std::size_t m) const {
    return {winner_gaps_.data() + m * k_, k_};
  }
  // True when every matrix the trace can emit has a Condorcet winner.
  bool condorcet_class() const;

  bool is_piecewise() const { return std::holds_alternative<Segments>(provider_); }
  const std::vector<Segment>& segments() const;

 private:
  struct Explicit {};
  struct Segments {
    std::vector<Segment> list;
  };
  struct Mixture {
    std::uint64_t seed;
    StreamKey key;
  };

  EnvironmentTrace(Round horizon, std::vector<PreferenceMatrix> table,
                   std::variant<Explicit, Segments, Mixture> provider);

  void check_round(Round t) const;

  Round horizon_;
  std::size_t k_;
  std::vector<PreferenceMatrix> table_;
  std::vector<std::optional<Arm>> winners_;
  // winner_gaps_[m * k + a] = delta(a*, a) under table entry m (NaN without CW).
  std::vector<double> winner_gaps_;
  std::variant<Explicit, Segments, Mixture> provider_;
};

// Geometric BTL trace starting from the identity ranking; at each changepoint
// a fresh uniform permutation is drawn from `rng`. Changepoints must be
// strictly increasing and lie in (1, horizon].
EnvironmentTrace switching_btl_trace(std::size_t k, Round horizon,
                                     std::span<const Round> changepoints, RngStream& rng);

// Condorcet lower-bound adversary: each round independently lower_bound_plus
// or lower_bound_minus with probability 1/2, coin keyed by rng's seed/key.
EnvironmentTrace condorcet_lower_bound_trace(Round horizon, double epsilon, const RngStream& rng);

// Same mixture over the SST-violating pair.
EnvironmentTrace sst_violating_trace(Round horizon, double epsilon, const RngStream& rng);

// Stationary BTL whose ranking is reversed at `flip_round` (every gap changes
// sign): a single severe shift.
EnvironmentTrace btl_flip_trace(std::size_t k, Round horizon, Round flip_round);

// ---------------------------------------------------------------------------
// Trace files
//
//   T K
//   SEGMENTS n
//   <start_round> <matrix file>        (n lines; paths relative to the trace)
// or
//   T K
//   EXPLICIT
//   <T matrices in the matrix text format>

EnvironmentTrace read_trace_file(const std::string& path);
// Writes EXPLICIT form for non-piecewise traces. For piecewise traces writes
// SEGMENTS and one matrix file per segment next to `path`.
void write_trace_file(const std::string& path, const EnvironmentTrace& trace);

}  // namespace duelbench
