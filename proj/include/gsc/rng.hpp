#pragma once

#include <cstdint>

namespace gsc {

/// SplitMix64 stream. Streams are keyed by (seed, counter) so that every
/// Monte Carlo trial draws from its own generator regardless of execution
/// order or thread placement.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, bound) by rejection.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

/// Generator for one trial, independent of every other trial.
inline SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mixer(seed ^ (0x632be59bd9b4e019ULL * (trial + 1)));
  return SplitMix64(mixer.next());
}

}  // namespace gsc
