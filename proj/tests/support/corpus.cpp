#include "support/corpus.hpp"

#include <algorithm>
#include <numeric>

namespace duelbench::testing {

namespace {

PreferenceMatrix btl(std::size_t k, std::vector<std::size_t> ranking) {
  return geometric_btl(k, ranking);
}

std::vector<std::size_t> rotated(std::size_t k, std::size_t shift) {
  std::vector<std::size_t> r(k);
  for (std::size_t a = 0; a < k; ++a) r[a] = (a + shift) % k + 1;
  return r;
}

// Weighted BTL with explicit weights.
PreferenceMatrix weighted(const std::vector<double>& w) {
  const std::size_t k = w.size();
  std::vector<double> e(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) e[i * k + j] = i == j ? 0.5 : w[i] / (w[i] + w[j]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) e[j * k + i] = 1.0 - e[i * k + j];
  }
  return PreferenceMatrix(k, e);
}

}  // namespace

PreferenceMatrix random_cw_matrix(std::size_t k, Arm winner, double min_gap, double max_gap,
                                  RngStream& rng) {
  std::vector<double> e(k * k, 0.5);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double p;
      if (i == winner) {
        p = 0.5 + min_gap + (max_gap - min_gap) * rng.uniform();
      } else if (j == winner) {
        p = 0.5 - min_gap - (max_gap - min_gap) * rng.uniform();
      } else {
        p = rng.uniform();
      }
      e[i * k + j] = p;
      e[j * k + i] = 1.0 - p;
    }
  }
  return PreferenceMatrix(k, e);
}

std::vector<NamedTrace> oracle_corpus() {
  std::vector<NamedTrace> out;
  auto add = [&](std::string name, EnvironmentTrace trace) {
    out.push_back(NamedTrace{std::move(name), std::move(trace)});
  };
  auto piece = [](Round horizon, std::vector<std::pair<Round, PreferenceMatrix>> segs) {
    return EnvironmentTrace::piecewise(horizon, std::move(segs));
  };

  add("stationary-k3", piece(200, {{1, btl(3, identity_ranking(3))}}));
  add("stationary-k4", piece(150, {{1, btl(4, reversed_ranking(4))}}));
  add("flip-k2-mid", btl_flip_trace(2, 200, 101));
  add("flip-k3-early", btl_flip_trace(3, 200, 50));
  add("flip-k4-late", btl_flip_trace(4, 200, 190));
  add("blip-k3-short", piece(200, {{1, btl(3, identity_ranking(3))},
                                   {80, btl(3, reversed_ranking(3))},
                                   {91, btl(3, identity_ranking(3))}}));
  add("blip-k3-long", piece(200, {{1, btl(3, identity_ranking(3))},
                                  {60, btl(3, reversed_ranking(3))},
                                  {141, btl(3, identity_ranking(3))}}));
  add("single-round", piece(1, {{1, btl(2, identity_ranking(2))}}));
  add("two-rounds-flip", btl_flip_trace(2, 2, 2));
  {
    std::vector<std::pair<Round, PreferenceMatrix>> segs;
    for (Round s = 1; s <= 200; s += 10) {
      segs.emplace_back(s, btl(4, (s / 10) % 2 ? reversed_ranking(4) : identity_ranking(4)));
    }
    add("alternate-k4-every10", piece(200, std::move(segs)));
  }
  add("thm1-mixture-small-eps",
      condorcet_lower_bound_trace(200, 0.1, RngStream(7, StreamKey{0, Purpose::kEnvironment, 0})));
  add("thm1-mixture-large-eps",
      condorcet_lower_bound_trace(200, 0.45, RngStream(8, StreamKey{0, Purpose::kEnvironment, 0})));
  add("remark-b1-mixture",
      sst_violating_trace(150, 0.3, RngStream(9, StreamKey{0, Purpose::kEnvironment, 0})));
  {
    std::vector<std::pair<Round, PreferenceMatrix>> segs;
    for (Round s = 1, n = 0; s <= 200; s += 40, ++n) {
      segs.emplace_back(s, btl(4, rotated(4, static_cast<std::size_t>(n))));
    }
    add("rotate-k4-every40", piece(200, std::move(segs)));
  }
  {
    // Weights drift linearly so the winner changes gradually from arm 1 to 3.
    std::vector<PreferenceMatrix> rounds;
    for (Round t = 1; t <= 120; ++t) {
      const double x = static_cast<double>(t - 1) / 119.0;
      rounds.push_back(weighted({4.0 - 3.0 * x, 2.0, 1.0 + 3.0 * x}));
    }
    add("drift-k3", EnvironmentTrace::from_matrices(std::move(rounds)));
  }
  {
    RngStream rng(11, StreamKey{0, Purpose::kEnvironment, 0});
    const Round cps[] = {50, 100, 150};
    add("btl-k4-three-changes", switching_btl_trace(4, 200, cps, rng));
  }
  add("tiny-gaps-k3", piece(200, {{1, weighted({1.02, 1.01, 1.0})},
                                  {100, weighted({1.0, 1.01, 1.02})}}));
  add("winner-unchanged-k3", piece(180, {{1, weighted({8.0, 2.0, 1.0})},
                                         {90, weighted({8.0, 1.0, 2.0})}}));

  // Seeded random piecewise traces.
  RngStream rng(2024, StreamKey{0, Purpose::kValidation, 0});
  while (out.size() < 30) {
    const std::size_t k = 2 + rng.uniform_index(3);
    const Round horizon = 20 + static_cast<Round>(rng.uniform_index(181));
    const std::size_t changes = rng.uniform_index(6);
    std::vector<Round> starts{1};
    for (std::size_t c = 0; c < changes; ++c) starts.push_back(2 + static_cast<Round>(rng.uniform_index(horizon - 1)));
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    const bool small_gaps = rng.uniform() < 0.3;
    std::vector<std::pair<Round, PreferenceMatrix>> segs;
    for (Round s : starts) {
      const Arm w = rng.uniform_index(k);
      segs.emplace_back(s, small_gaps ? random_cw_matrix(k, w, 0.0, 0.1, rng)
                                      : random_cw_matrix(k, w, 0.05, 0.5, rng));
    }
    add("random-" + std::to_string(out.size()), piece(horizon, std::move(segs)));
  }
  return out;
}

}  // namespace duelbench::testing
