#pragma once

#include <cstdint>
#include <vector>

namespace dds {

// ---- hashing --------------------------------------------------------------

inline uint64_t hash64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Derives the seed of an independent substream. Parallel loops draw from
// substream(seed, index) so results do not depend on thread count or
// iteration order.
inline uint64_t substream_seed(uint64_t seed, uint64_t index) {
  return hash64(hash64(seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// ---- splitmix64 -----------------------------------------------------------

class rng {
 public:
  explicit rng(uint64_t seed) : state_(seed) {}
  rng(uint64_t seed, uint64_t stream) : state_(substream_seed(seed, stream)) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next()) * n) >> 64);
  }

  // Index drawn proportionally to non-negative weights w (total = sum(w)).
  int categorical(const double* w, int n, double total) {
    double u = u01() * total;
    double acc = 0.0;
    int last = 0;
    for (int i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      last = i;
      if (u < acc) return i;
    }
    return last;
  }

  int categorical(const std::vector<double>& w, double total) {
    return categorical(w.data(), static_cast<int>(w.size()), total);
  }

 private:
  uint64_t state_;
};

}  // namespace dds
