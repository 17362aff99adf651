#pragma once

#include <cstdint>

namespace sbp {

// SplitMix64 finalizer over a counter stream. value(seed, k) is a pure
// function, so any entry of the stream can be produced independently; this is
// what makes instances reproducible across partitionings and languages.
inline std::uint64_t splitmix64_value(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// uniform in (0, 1]; the +1 keeps log(u) finite
inline double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Deterministic counter-based stream used everywhere randomness is needed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(splitmix64_value(seed, stream)) {}

  std::uint64_t next_u64() { return splitmix64_value(seed_, ctr_++); }
  double next_unit() { return unit_from_bits(next_u64()); }
  bool next_sign() { return (next_u64() & 1ULL) != 0; }

 private:
  std::uint64_t seed_;
  std::uint64_t ctr_ = 0;
};

}  // namespace sbp
