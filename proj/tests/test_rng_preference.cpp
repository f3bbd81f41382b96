#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "duelbench/errors.hpp"
#include "duelbench/preference.hpp"
#include "duelbench/rng.hpp"

using namespace duelbench;

TEST_CASE("keyed draws are deterministic and order sensitive") {
  CHECK(keyed_uniform(1, {2, 3}) == keyed_uniform(1, {2, 3}));
  CHECK(keyed_uniform(1, {2, 3}) != keyed_uniform(1, {3, 2}));
  CHECK(hash_key(1, {2, 3}) != hash_key(2, {2, 3}));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = keyed_uniform(5, {i});
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(to_unit(0) == 0.0);
  CHECK(to_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("streams are reproducible and separated by key") {
  RngStream a(42, StreamKey{3, Purpose::kDuel, 0});
  RngStream b(42, StreamKey{3, Purpose::kDuel, 0});
  RngStream c(42, StreamKey{3, Purpose::kPolicy, 0});
  RngStream d(42, StreamKey{4, Purpose::kDuel, 0});
  bool differs_c = false;
  bool differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c = differs_c || x != c.next_u64();
    differs_d = differs_d || x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform_index covers its range evenly") {
  RngStream rng(9, StreamKey{});
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.uniform_index(n);
    REQUIRE(v < n);
    ++counts[v];
  }
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  const double expected = draws / static_cast<double>(n);
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.46);
  CHECK(rng.uniform_index(1) == 0);
  CHECK_THROWS_AS(rng.uniform_index(0), ArgumentError);
}

TEST_CASE("bernoulli frequency") {
  RngStream rng(10, StreamKey{});
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3);
  // Binomial sd is sqrt(n * 0.21) ~ 145; allow 5 sd.
  CHECK(std::abs(hits - 30000) < 725);
}

TEST_CASE("preference matrix invariants are enforced") {
  CHECK_NOTHROW(PreferenceMatrix(2, {0.5, 0.7, 0.3, 0.5}));
  CHECK_THROWS_AS(PreferenceMatrix(2, {0.5, 0.7, 0.4, 0.5}), ArgumentError);
  CHECK_THROWS_AS(PreferenceMatrix(2, {0.6, 0.7, 0.3, 0.4}), ArgumentError);
  CHECK_THROWS_AS(PreferenceMatrix(2, {0.5, 1.2, -0.2, 0.5}), ArgumentError);
  CHECK_THROWS_AS(PreferenceMatrix(2, {0.5, 0.5, 0.5}), ArgumentError);
  CHECK_THROWS_AS(PreferenceMatrix(0, {}), ArgumentError);
  // Within tolerance is accepted.
  CHECK_NOTHROW(PreferenceMatrix(2, {0.5, 0.7, 0.3 + 1e-13, 0.5}));
  CHECK_NOTHROW(PreferenceMatrix(1, {0.5}));
}

TEST_CASE("gap and checked access") {
  const PreferenceMatrix p(3, {0.5, 0.8, 0.6, 0.2, 0.5, 0.4, 0.4, 0.6, 0.5});
  CHECK(gap(p, 0, 1) == doctest::Approx(0.3));
  CHECK(gap(p, 1, 0) == doctest::Approx(-0.3));
  CHECK(gap(p, 2, 2) == 0.0);
  CHECK(p.at(2, 1) == 0.6);
  CHECK_THROWS_AS(p.at(3, 0), ArgumentError);
  CHECK_THROWS_AS(gap(p, 0, 5), ArgumentError);
  const PreferenceMatrix q(3, {0.5, 0.8, 0.65, 0.2, 0.5, 0.4, 0.35, 0.6, 0.5});
  CHECK(p.max_abs_difference(q) == doctest::Approx(0.05));
}

TEST_CASE("matrix text round trip is lossless") {
  RngStream rng(3, StreamKey{});
  const std::size_t k = 5;
  std::vector<double> e(k * k, 0.5);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      e[i * k + j] = rng.uniform();
      e[j * k + i] = 1.0 - e[i * k + j];
    }
  }
  const PreferenceMatrix p(k, e);
  std::istringstream in(to_text(p));
  const PreferenceMatrix q = read_matrix(in);
  REQUIRE(q.k() == k);
  for (std::size_t n = 0; n < k * k; ++n) CHECK(q.entries()[n] == p.entries()[n]);
  CHECK(to_text(p).find('\r') == std::string::npos);
}

TEST_CASE("matrix parsing rejects malformed input") {
  std::istringstream truncated("3\n0.5 0.5\n");
  CHECK_THROWS_AS(read_matrix(truncated), ArgumentError);
  std::istringstream bad_k("x\n");
  CHECK_THROWS_AS(read_matrix(bad_k), ArgumentError);
  std::istringstream invalid("2\n0.5 0.9\n0.9 0.5\n");
  CHECK_THROWS_AS(read_matrix(invalid), ArgumentError);
  CHECK_THROWS_AS(read_matrix_file("/nonexistent/matrix.txt"), ArgumentError);
}

TEST_CASE("sampled duels follow the matrix") {
  const PreferenceMatrix p(2, {0.5, 0.75, 0.25, 0.5});
  RngStream rng(4, StreamKey{});
  int wins = 0;
  const int n = 40000;
  for (int t = 1; t <= n; ++t) {
    const DuelOutcome o = sample_duel(p, 0, 1, t, rng);
    CHECK(o.first == 0);
    CHECK(o.second == 1);
    CHECK(o.round == t);
    wins += o.first_won;
  }
  // sd = sqrt(n * 3/16) ~ 87.
  CHECK(std::abs(wins - 30000) < 435);
}
