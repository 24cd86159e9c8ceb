#pragma once

#include <cstdint>

namespace tvdist {

// Counter-based generator (SplitMix64). Streams are derived from
// (seed, stream index), so sample i draws the same randomness whether
// the run is serial or partitioned across threads.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      std::uint64_t v = next_u64();
      if (v >= threshold) return v % bound;
    }
  }

  static SplitMix64 derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mixer(seed);
    std::uint64_t a = mixer.next_u64();
    SplitMix64 mixer2(stream ^ 0xd1b54a32d192ed03ULL);
    std::uint64_t b = mixer2.next_u64();
    return SplitMix64(a ^ (b + 0x9e3779b97f4a7c15ULL));
  }

 private:
  std::uint64_t state_;
};

}  // namespace tvdist
