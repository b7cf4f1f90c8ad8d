#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dicf {

// Deterministic, seedable, splittable generator (xoshiro256** seeded via
// splitmix64). Splitting derives an independent stream from (seed, index),
// so per-trial streams do not depend on execution order or thread count.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) { seed_state(seed); }

  static SplitRng for_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    SplitRng r(0);
    r.seed_state(mix(master_seed ^ mix(stream_index + 0x9e3779b97f4a7c15ULL)));
    return r;
  }

  SplitRng split(std::uint64_t index) const {
    return for_stream(origin_, index);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  int bit() { return static_cast<int>(next_u64() >> 63); }

  // Sample an index from unnormalized nonnegative weights.
  int discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("discrete: weights sum to zero");
    double u = uniform01() * total;
    double acc = 0.0;
    for (size_t k = 0; k < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size() - 1);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void seed_state(std::uint64_t seed) {
    origin_ = seed;
    std::uint64_t z = seed;
    for (auto& s : s_) {
      z += 0x9e3779b97f4a7c15ULL;
      s = mix(z);
    }
  }

  std::uint64_t s_[4] = {};
  std::uint64_t origin_ = 0;
};

}  // namespace dicf
