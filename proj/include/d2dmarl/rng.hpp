#pragma once

// Deterministic random number utilities. Everything in the simulator that
// draws randomness goes through SplitMix64 streams or stateless key hashes,
// so a (seed, slot, link) triple always produces the same value regardless
// of call order elsewhere.

#include <cmath>
#include <cstdint>

namespace d2dmarl::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stateless hash of a key sequence; used to derive independent sub-seeds
// and per-(seed, slot, link) draws.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  std::uint64_t z = splitmix64(s);
  return z;
}

template <typename... Rest>
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix(mix(a, b), static_cast<std::uint64_t>(rest)...);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1); safe for log().
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free modulo bias is negligible for n << 2^64; keep it simple
    // and deterministic.
    return next_u64() % n;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

inline double u64_to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline double u64_to_open_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Unit-mean exponential via inverse CDF.
inline double exponential_unit_mean(double u01) { return -std::log1p(-u01); }

// Standard Gumbel(0,1) via inverse CDF; u must be in (0,1).
inline double gumbel(double u01) { return -std::log(-std::log(u01)); }

}  // namespace d2dmarl::rng
