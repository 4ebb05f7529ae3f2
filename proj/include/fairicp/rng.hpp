#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace fairicp {

// Deterministic RNG used everywhere in place of <random> distributions,
// whose output is implementation-defined. Same seed, same stream, on any
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_{} { reseed(seed); }

  void reseed(std::uint64_t seed) {
    // mt19937_64-style single-value expansion (Knuth LCG fill).
    state_.resize(312);
    state_[0] = seed;
    for (std::size_t i = 1; i < 312; ++i) {
      state_[i] =
          6364136223846793005ULL * (state_[i - 1] ^ (state_[i - 1] >> 62)) + i;
    }
    index_ = 312;
    has_cached_normal_ = false;
  }

  std::uint64_t next_u64() {
    if (index_ >= 312) twist();
    std::uint64_t x = state_[index_++];
    x ^= (x >> 29) & 0x5555555555555555ULL;
    x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
    x ^= (x << 37) & 0xFFF7EEE000000000ULL;
    x ^= x >> 43;
    return x;
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Requires n >= 1.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; second value cached.
  double normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Exponential with the given scale (mean).
  double exponential(double scale) { return -scale * std::log(uniform_pos()); }

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    shuffle(p);
    return p;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  void twist() {
    constexpr std::uint64_t kUpper = 0xFFFFFFFF80000000ULL;
    constexpr std::uint64_t kLower = 0x7FFFFFFFULL;
    for (std::size_t i = 0; i < 312; ++i) {
      std::uint64_t x =
          (state_[i] & kUpper) | (state_[(i + 1) % 312] & kLower);
      std::uint64_t y = x >> 1;
      if (x & 1ULL) y ^= 0xB5026F5AA96619E9ULL;
      state_[i] = state_[(i + 156) % 312] ^ y;
    }
    index_ = 0;
  }

  std::vector<std::uint64_t> state_;
  std::size_t index_ = 312;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// splitmix64 finalizer; used to derive decorrelated sub-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fairicp
