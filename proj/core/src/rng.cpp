#include "duelbench/rng.hpp"

#include "duelbench/errors.hpp"

namespace duelbench {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  return to_unit(hash_key(seed, parts));
}

RngStream::RngStream(std::uint64_t master_seed, StreamKey key)
    : master_seed_(master_seed),
      key_(key),
      engine_(hash_key(master_seed,
                       {key.trial, static_cast<std::uint64_t>(key.purpose), key.round})) {}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_index: empty range");
  // Rejection keeps every residue equally likely.
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace duelbench
