#pragma once

#include <cmath>
#include <cstdint>

namespace corrsel {

// xoshiro256** seeded through splitmix64.
//
// Every stochastic component of the toolkit (scene generation, hypothesis
// sampling) draws from this generator rather than <random> distributions, so
// that a given seed produces the same byte-for-byte output on every platform
// and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n); n > 0. Multiply-high rejection-free mapping,
  // bias is below 2^-64 and irrelevant next to determinism.
  std::uint64_t uniform_int(std::uint64_t n) {
    const auto wide = static_cast<__uint128_t>(next()) * static_cast<__uint128_t>(n);
    return static_cast<std::uint64_t>(wide >> 64);
  }

  // Box-Muller; the second deviate of each pair is cached.
  double normal(double mean = 0.0, double sigma = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sigma * spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + sigma * r * std::cos(a);
  }

  // Stable derivation of an independent stream, used for per-scene seeds.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    return splitmix64(x);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace corrsel
