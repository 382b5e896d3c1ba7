#pragma once

#include <cstdint>

namespace aespec {

/// Counter-based generator: the n-th output is a pure function of (key, n).
///
/// The mixing function is the SplitMix64 finalizer applied to
/// key + n * golden_gamma. Streams are split by hashing a stream id into a
/// fresh key, so samplers on different workers never share state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Independent child generator for `stream`.
  CounterRng split(std::uint64_t stream) const { return CounterRng(key_, mix(stream + 0x3c6ef372fe94f82bULL)); }

  std::uint64_t next_u64() { return mix(key_ + (counter_++) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, bound); bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Marsaglia polar method. The spare variate is kept.
  double gaussian();

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  CounterRng(std::uint64_t parent_key, std::uint64_t salt) : key_(mix(parent_key ^ salt)) {}

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace aespec
