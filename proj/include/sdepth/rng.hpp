#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sdepth/core.hpp"

namespace sdepth {

// ===== Deterministic random number generation =====
//
// xoshiro256++ seeded through splitmix64, with uniform doubles built from the
// top 53 bits and normals from Box-Muller over exactly two uniforms per draw.
// Every consumer in the library goes through this generator: the standard
// library distributions are not bit-identical across implementations, and
// seeded runs here must be.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) {
      word = splitmix64_next(sm);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, bound) without modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    std::uint64_t r;
    do {
      r = next();
    } while (r < threshold);
    return r % bound;
  }

  // Standard normal via Box-Muller. Consumes exactly two uniforms and keeps
  // no cached state, so the stream position depends only on the draw count.
  double gaussian() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Advances 2^192 steps: the standard substream jump. Worker w of a parallel
  // loop uses a copy of the seeded generator jumped w times.
  void long_jump() {
    static constexpr std::uint64_t kJump[] = {0x76E15D3EFEFDCBBFULL, 0xC5004E441C522FB3ULL,
                                              0x77710069854EE241ULL, 0x39109BB02ACBE635ULL};
    std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (const std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (1ULL << b)) {
          s0 ^= s_[0];
          s1 ^= s_[1];
          s2 ^= s_[2];
          s3 ^= s_[3];
        }
        next();
      }
    }
    s_[0] = s0;
    s_[1] = s1;
    s_[2] = s2;
    s_[3] = s3;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

// Stable seed derivation for nested loops (bench cells, per-method streams):
// folds each coordinate into the splitmix64 state so the derived seed depends
// only on (master, a, b, c), never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t state = master;
  splitmix64_next(state);
  state ^= 0x9E3779B97F4A7C15ULL * (a + 1);
  splitmix64_next(state);
  state ^= 0xBF58476D1CE4E5B9ULL * (b + 1);
  splitmix64_next(state);
  state ^= 0x94D049BB133111EBULL * (c + 1);
  return splitmix64_next(state);
}

// n i.i.d. standard Gaussian points in R^d, fully determined by the seed.
inline std::vector<Vector> standard_gaussian_dataset(int n, int d, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  std::vector<Vector> x(static_cast<std::size_t>(n));
  for (auto& xi : x) {
    xi.resize(d);
    for (int j = 0; j < d; ++j) {
      xi(j) = rng.gaussian();
    }
  }
  return x;
}

}  // namespace sdepth
