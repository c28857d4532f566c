#pragma once

#include <cstdint>

namespace herman {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t mix64(std::uint64_t z);

/// Counter-based 64-bit stream: the n-th output is mix64(seed + n * 0x9e3779b97f4a7c15),
/// which is exactly SplitMix64. Coin flips consume one output per 64 coins, least
/// significant bit first, so the coin sequence is a pure function of the seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  bool coin();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound); bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
  std::uint64_t coin_word_ = 0;
  int coins_left_ = 0;
};

/// Stream for task `index` under `master_seed`: RandomStream(mix64(master_seed ^ mix64(index))).
RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace herman
