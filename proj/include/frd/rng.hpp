#pragma once

#include <cmath>
#include <cstdint>

namespace frd {

/// Counter-based generator built on the SplitMix64 finalizer. Every draw is a
/// pure function of (seed, c0, c1, c2, c3), so independent streams can be
/// assigned per (sample index, dual point index, component) without shared
/// state; batches are bit-reproducible under any parallel schedule.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0,
                     std::uint64_t c3 = 0) const {
    std::uint64_t h = mix(seed_ ^ 0x6a09e667f3bcc909ULL);
    h = mix(h ^ c0);
    h = mix(h ^ c1);
    h = mix(h ^ c2);
    h = mix(h ^ c3);
    return h;
  }

  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0,
                 std::uint64_t c3 = 0) const {
    const std::uint64_t b = bits(c0, c1, c2, c3);
    return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two counter-derived uniforms.
  double gaussian(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0,
                  std::uint64_t c3 = 0) const {
    const double u1 = uniform(c0, c1, c2, 2 * c3);
    const double u2 = uniform(c0, c1, c2, 2 * c3 + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace frd
