#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace ndr {

// splitmix64 step. Used to expand seeds and to derive substream seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ with explicit seeding. Every stochastic draw in the library
// goes through this class, so a run is a pure function of (seed, draw order)
// and does not depend on platform or standard-library internals.
class rng {
 public:
  explicit rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64_next(x);
  }

  // Substream `index` of `master`. Streams for distinct indices are
  // independent for practical purposes, and adding replicas never perturbs
  // the streams of earlier replicas.
  static rng substream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t x = master;
    std::uint64_t mixed = splitmix64_next(x);
    std::uint64_t y = mixed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return rng(splitmix64_next(y));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform in [0, n). Rejection sampling, exactly uniform.
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Index draw from nonnegative weights that sum to ~1. The last positive
  // weight absorbs any floating remainder.
  std::size_t pick_weighted(const std::vector<double>& weights) {
    double u = uniform01();
    std::size_t last_positive = 0;
    bool seen = false;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      seen = true;
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    assert(seen);
    (void)seen;
    return last_positive;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t state_[4]{};
};

}  // namespace ndr
