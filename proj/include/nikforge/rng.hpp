#pragma once

// Deterministic 64-bit generator (splitmix64). Every randomized choice in
// the pipeline draws from this so a run is reproducible from its seed alone,
// independent of platform or standard library.

#include <cstdint>

#include "nikforge/rational.hpp"

namespace nikforge {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n), n > 0; rejection keeps the draw unbiased
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = n * ((~0ull) / n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // uniform integer in [lo, hi] inclusive
  long long range(long long lo, long long hi) {
    return lo + (long long)below((std::uint64_t)(hi - lo + 1));
  }

  Int small_int(long long lo, long long hi) { return Int(range(lo, hi)); }

 private:
  std::uint64_t state_;
};

}  // namespace nikforge
