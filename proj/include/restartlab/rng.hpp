#pragma once

#include <cstdint>

namespace restartlab {

inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64. One stream per simulation trial;
// streams are single-owner and never shared between threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64_next(x);
  }

  // Derives an independent stream for trial `trial` of a run seeded with
  // `seed`, so results do not depend on scheduling or thread count.
  static RandomStream for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
    std::uint64_t x = seed ^ 0x9E3779B97F4A7C15ull;
    (void)splitmix64_next(x);
    x += (trial + 1) * 0xBF58476D1CE4E5B9ull;
    return RandomStream(x);
  }

  std::uint64_t next_u64() noexcept {
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

  // Uniform in [0, 1).
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; used for inverse-CDF draws so that the mass at +inf
  // is hit with probability exactly p_inf.
  double uniform_open01() noexcept { return 1.0 - uniform01(); }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) noexcept { return (v << k) | (v >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace restartlab
