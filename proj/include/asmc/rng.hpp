#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace asmc::rng {

// Stream identity. Two keys that differ in any field yield statistically
// independent streams; equal keys yield identical streams on every worker.
struct Key {
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
  std::uint64_t particle = 0;
  std::uint64_t step = 0;
  std::uint64_t substep = 0;
};

// Substep labels used across the library.
inline constexpr std::uint64_t kSubstepInit = 0;
inline constexpr std::uint64_t kSubstepExplore = 1;
inline constexpr std::uint64_t kSubstepResample = 2;
inline constexpr std::uint64_t kSubstepSwap = 3;

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Counter-keyed generator: the key is hashed into a xoshiro256++ state.
// No splitting trees; every (key) pair addresses its stream directly.
class Stream {
 public:
  explicit Stream(const Key& k) {
    using detail::mix64;
    std::uint64_t acc = mix64(k.seed + 0x9E3779B97F4A7C15ULL);
    acc = mix64(acc ^ (k.round + 0xD1B54A32D192ED03ULL));
    acc = mix64(acc ^ (k.particle + 0x8CB92BA72F3D8DD7ULL));
    acc = mix64(acc ^ (k.step + 0xA24BAED4963EE407ULL));
    acc = mix64(acc ^ (k.substep + 0x9FB21C651E98DF25ULL));
    for (auto& s : state_) {
      acc += 0x9E3779B97F4A7C15ULL;
      s = mix64(acc);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    using detail::rotl;
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

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586477 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Index draw from unnormalized non-negative mass vector.
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform() * total;
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      c += weights[i];
      if (u < c) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline Stream stream_for(const Key& k) { return Stream(k); }

}  // namespace asmc::rng
