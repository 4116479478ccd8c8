#pragma once

#include <cstdint>

namespace tele::rng {

// SplitMix64 (https://prng.di.unimi.it). Used directly as the per-trial stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Finaliser of SplitMix64, used to scatter (seed, index) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream for trial `index` of a run seeded with `seed`. Depends only on the
// pair, never on which worker executes the trial.
inline SplitMix64 child(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ull);
  return SplitMix64(mix64(s ^ mix64(index * 0xd1b54a32d192ed03ull + 0x8bb84b93962eacc9ull)));
}

}  // namespace tele::rng
