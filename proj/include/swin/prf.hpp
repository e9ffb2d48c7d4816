#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace swin {

// SplitMix64 finalizer.  Stable across platforms and compilers, which is what
// makes sketches replayable: every random decision in the library is a pure
// function of a seed and a handful of identifying words fed through this mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Keyed pseudorandom function over a short word sequence.
inline std::uint64_t prf(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc908ULL);
  for (std::uint64_t w : words) h = mix64(h ^ w);
  return h;
}

inline std::uint64_t prf(std::uint64_t seed, const std::vector<std::uint64_t>& words) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc908ULL);
  for (std::uint64_t w : words) h = mix64(h ^ w);
  return h;
}

// Uniform double in [0, 1) from the top 53 bits of a PRF output.
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double prf_unit(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
  return to_unit(prf(seed, words));
}

// Small counter-based generator for recover-time sampling (coreset draws,
// level selection).  Deterministic given the seed, independent of call sites
// elsewhere: each next() advances a private counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ ^ mix64(counter_++)); }

  double next_unit() { return to_unit(next_u64()); }

  // Uniform integer in [0, n).  n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace swin
