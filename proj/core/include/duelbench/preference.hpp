#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "duelbench/rng.hpp"

namespace duelbench {

// Arms are 0-based inside the library. Every file format, CLI output and log
// the tools emit uses 1-based arm numbers.
using Arm = std::size_t;

// Rounds are 1-based: t in [1, T].
using Round = std::int64_t;

// One round's pairwise win probabilities: entry (i, j) is the probability that
// arm i is preferred to arm j. Immutable; the constructor enforces
// P(i,j) + P(j,i) = 1, P(i,i) = 1/2 and entries in [0, 1] up to kTolerance.
class PreferenceMatrix {
 public:
  static constexpr double kTolerance = 1e-12;

  PreferenceMatrix(std::size_t k, std::vector<double> entries);

  std::size_t k() const { return k_; }

  // Unchecked access.
  double operator()(Arm i, Arm j) const { return entries_[i * k_ + j]; }
  // Bounds-checked access; throws ArgumentError.
  double at(Arm i, Arm j) const;

  std::span<const double> row(Arm i) const {
    return {entries_.data() + i * k_, k_};
  }
  std::span<const double> entries() const { return entries_; }

  // Largest absolute entry-wise difference; matrices must have equal k.
  double max_abs_difference(const PreferenceMatrix& other) const;

 private:
  std::size_t k_;
  std::vector<double> entries_;
};

// delta(i, j) = P(i, j) - 1/2. Throws ArgumentError on a bad index.
double gap(const PreferenceMatrix& p, Arm i, Arm j);

struct DuelOutcome {
  Arm first = 0;
  Arm second = 0;
  Round round = 0;
  // True when `first` was preferred.
  bool first_won = false;
};

// Draws O ~ Bernoulli(P(i, j)) from `rng`.
DuelOutcome sample_duel(const PreferenceMatrix& p, Arm i, Arm j, Round round, RngStream& rng);

// Text form: a line holding K, then K lines of K space-separated decimals.
// Values are written with 17 significant digits so parsing is lossless.
std::string to_text(const PreferenceMatrix& p);
void write_matrix(std::ostream& out, const PreferenceMatrix& p);
PreferenceMatrix read_matrix(std::istream& in);
PreferenceMatrix read_matrix_file(const std::string& path);

}  // namespace duelbench
