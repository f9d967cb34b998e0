#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "gg/error.hpp"

namespace gg {

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds several identifiers (run seed, epoch, batch, episode, ...) into one
// stream seed so parallel workers get independent, reproducible streams.
inline uint64_t mix_seed(std::initializer_list<uint64_t> parts) {
  uint64_t state = 0x8000000000000001ULL;
  uint64_t h = 0;
  for (uint64_t p : parts) {
    state ^= p;
    h = splitmix64(state) ^ (h * 0x100000001b3ULL);
  }
  return h;
}

// xoshiro256** with an explicit uniform mapping. std::distributions are
// implementation-defined; everything here is pinned so reruns are bit-equal.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int64_t uniform_int(int64_t n) {
    if (n <= 0) throw IndexError("uniform_int: n must be positive");
    return static_cast<int64_t>(next_u64() % static_cast<uint64_t>(n));
  }

  // Draws an index from an (already normalized) probability vector.
  int64_t multinomial(std::span<const double> probs) {
    if (probs.empty()) throw DimensionError("multinomial: empty distribution");
    double u = uniform();
    double acc = 0.0;
    int64_t last_positive = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) last_positive = static_cast<int64_t>(i);
      acc += probs[i];
      if (u < acc) return static_cast<int64_t>(i);
    }
    return last_positive;  // guards against cumulative rounding
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace gg
