#include "duelbench/preference.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "duelbench/errors.hpp"

namespace duelbench {

PreferenceMatrix::PreferenceMatrix(std::size_t k, std::vector<double> entries)
    : k_(k), entries_(std::move(entries)) {
  if (k_ == 0) throw ArgumentError("preference matrix needs at least one arm");
  if (entries_.size() != k_ * k_) {
    throw ArgumentError(fmt::format("preference matrix: expected {} entries, got {}", k_ * k_,
                                    entries_.size()));
  }
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      const double pij = entries_[i * k_ + j];
      if (!(pij >= -kTolerance && pij <= 1.0 + kTolerance)) {
        throw ArgumentError(fmt::format("entry ({},{}) = {} outside [0,1]", i + 1, j + 1, pij));
      }
      if (std::abs(pij + entries_[j * k_ + i] - 1.0) > kTolerance) {
        throw ArgumentError(
            fmt::format("entries ({0},{1}) and ({1},{0}) do not sum to 1", i + 1, j + 1));
      }
    }
    if (std::abs(entries_[i * k_ + i] - 0.5) > kTolerance) {
      throw ArgumentError(fmt::format("diagonal entry {} is not 1/2", i + 1));
    }
  }
}

double PreferenceMatrix::at(Arm i, Arm j) const {
  if (i >= k_ || j >= k_) {
    throw ArgumentError(fmt::format("arm pair ({},{}) out of range for K={}", i + 1, j + 1, k_));
  }
  return (*this)(i, j);
}

double PreferenceMatrix::max_abs_difference(const PreferenceMatrix& other) const {
  if (other.k_ != k_) throw ArgumentError("comparing matrices of different size");
  double worst = 0.0;
  for (std::size_t n = 0; n < entries_.size(); ++n) {
    worst = std::max(worst, std::abs(entries_[n] - other.entries_[n]));
  }
  return worst;
}

double gap(const PreferenceMatrix& p, Arm i, Arm j) { return p.at(i, j) - 0.5; }

DuelOutcome sample_duel(const PreferenceMatrix& p, Arm i, Arm j, Round round, RngStream& rng) {
  const double pij = p.at(i, j);
  return DuelOutcome{i, j, round, rng.uniform() < pij};
}

void write_matrix(std::ostream& out, const PreferenceMatrix& p) {
  out << p.k() << '\n';
  for (Arm i = 0; i < p.k(); ++i) {
    for (Arm j = 0; j < p.k(); ++j) {
      if (j) out << ' ';
      out << fmt::format("{:.17g}", p(i, j));
    }
    out << '\n';
  }
}

std::string to_text(const PreferenceMatrix& p) {
  std::ostringstream out;
  write_matrix(out, p);
  return out.str();
}

PreferenceMatrix read_matrix(std::istream& in) {
  long long k = 0;
  if (!(in >> k) || k <= 0) throw ArgumentError("matrix text: missing or invalid K");
  const auto n = static_cast<std::size_t>(k);
  std::vector<double> entries(n * n);
  for (auto& e : entries) {
    if (!(in >> e)) throw ArgumentError("matrix text: truncated entries");
  }
  return PreferenceMatrix(n, std::move(entries));
}

PreferenceMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open matrix file " + path);
  return read_matrix(in);
}

}  // namespace duelbench
