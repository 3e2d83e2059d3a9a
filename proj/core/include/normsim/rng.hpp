#pragma once

#include <cstdint>

namespace normsim {

// Small deterministic generator (splitmix64). std::mt19937_64 plus the
// standard distributions is not bit-reproducible across library versions,
// and byte-identical reruns are a hard requirement for the harness.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). Lemire's multiply-shift, debiased.
  std::uint32_t below(std::uint32_t bound) {
    std::uint64_t x = next() & 0xffffffffULL;
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m & 0xffffffffULL);
    if (lo < bound) {
      std::uint64_t threshold = (0x100000000ULL - bound) % bound;
      while (lo < threshold) {
        x = next() & 0xffffffffULL;
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m & 0xffffffffULL);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Uniform in [lo, hi], inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint32_t>(hi - lo + 1)));
  }

  // Uniform double in [0, 1).
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real01() < p; }

  // Decorrelated substream for a named concern (spawn / compliance / choice).
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t tag) {
    SplitMix64 mix(seed ^ (tag * 0xd1342543de82ef95ULL));
    mix.next();
    return SplitMix64(mix.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace normsim
