#pragma once

#include <cstdint>

namespace phaseopt {

// Counter-based generator: output i is mix64(seed + (i+1)*gamma), a pure
// function of (seed, counter). No global state; streams for parallel work
// are forked explicitly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Modulo bias is < 2^-40 for n < 2^24, which is
  // far below the statistical resolution of anything estimated here.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Independent stream derived from (seed, stream index).
  SplitMix64 fork(std::uint64_t stream) const {
    std::uint64_t z = seed_ ^ ((stream + 1) * 0xD6E8FEB86659FD93ULL);
    z = (z ^ (z >> 32)) * kGamma;
    return SplitMix64(z ^ (z >> 29));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace phaseopt
