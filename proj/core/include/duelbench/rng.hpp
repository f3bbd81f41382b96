#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace duelbench {

// Independent sources of randomness inside one trial. Each purpose gets its
// own substream so the adversary, the duel noise, the policy and the replay
// schedule can be replayed individually.
enum class Purpose : std::uint64_t {
  kEnvironment = 1,
  kDuel = 2,
  kPolicy = 3,
  kSchedule = 4,
  kValidation = 5,
};

struct StreamKey {
  std::uint64_t trial = 0;
  Purpose purpose = Purpose::kEnvironment;
  std::uint64_t round = 0;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive hash of a seed and a list of key parts.
std::uint64_t hash_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

// Top 53 bits of `bits` mapped to [0, 1).
double to_unit(std::uint64_t bits);

// Stateless draw in [0, 1) addressed by (seed, parts). Used where a value
// must be recomputable at any time without replaying a stream, e.g. the
// per-round adversary coin or the lazily sampled replay schedule.
double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

// Single-owner pseudo-random stream. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; the distributions below are
// implemented here rather than taken from <random> because the standard
// library distributions are not bit-reproducible across vendors.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamKey key);

  std::uint64_t next_u64() { return engine_(); }
  double uniform() { return to_unit(engine_()); }
  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t master_seed() const { return master_seed_; }
  const StreamKey& key() const { return key_; }

 private:
  std::uint64_t master_seed_;
  StreamKey key_;
  std::mt19937_64 engine_;
};

}  // namespace duelbench
