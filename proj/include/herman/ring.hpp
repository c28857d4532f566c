#pragma once

// Token ring state and the synchronous step of Herman's protocol.
//
// Processes are numbered 1..N clockwise. A token moving clockwise goes from
// process p to p+1 (N wraps to 1). Every public interface is 1-based.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "herman/random_stream.hpp"

namespace herman {

/// Token positions z(1) < ... < z(K) on a ring of N >= 3 processes.
/// K = 0 is representable because even token counts can annihilate completely.
class Configuration {
 public:
  Configuration(int ring_size, std::vector<int> positions);

  int ring_size() const { return ring_size_; }
  const std::vector<int>& positions() const { return positions_; }
  int token_count() const { return static_cast<int>(positions_.size()); }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  int ring_size_;
  std::vector<int> positions_;
};

/// K positive gaps summing to N. gaps[0] is the wrap-around gap N + z(1) - z(K),
/// gaps[i] = z(i+1) - z(i). The empty vector stands for the token-free ring.
class GapVector {
 public:
  GapVector(int ring_size, std::vector<int> gaps);

  int ring_size() const { return ring_size_; }
  const std::vector<int>& gaps() const { return gaps_; }
  int token_count() const { return static_cast<int>(gaps_.size()); }
  int operator[](std::size_t i) const { return gaps_[i]; }

  friend bool operator==(const GapVector&, const GapVector&) = default;
  friend auto operator<=>(const GapVector& a, const GapVector& b) {
    if (auto c = a.ring_size_ <=> b.ring_size_; c != 0) return c;
    return a.gaps_ <=> b.gaps_;
  }

 private:
  int ring_size_;
  std::vector<int> gaps_;
};

/// bit i set <=> token i (0-based, in position order) moves clockwise.
class MoveMask {
 public:
  MoveMask() = default;
  explicit MoveMask(std::vector<bool> moves) : moves_(std::move(moves)) {}

  /// Low `count` bits of `word`, bit i -> token i.
  static MoveMask from_word(std::uint64_t word, int count);
  static MoveMask all(int count, bool move) {
    return MoveMask(std::vector<bool>(static_cast<std::size_t>(count), move));
  }

  std::size_t size() const { return moves_.size(); }
  bool operator[](std::size_t i) const { return moves_[i]; }
  const std::vector<bool>& moves() const { return moves_; }

 private:
  std::vector<bool> moves_;
};

/// One bit per process; process i holds a token iff bit_i == bit_{i-1 mod N}.
struct BitRing {
  std::vector<bool> bits;
  int ring_size() const { return static_cast<int>(bits.size()); }
  friend bool operator==(const BitRing&, const BitRing&) = default;
};

GapVector gap_vector(const Configuration& config);

/// Inverse of gap_vector with the first token placed at process 1.
Configuration config_from_gaps(const GapVector& gaps);

/// Moves the masked tokens one step clockwise; two tokens on one process annihilate.
Configuration apply_step(const Configuration& config, const MoveMask& mask);

MoveMask random_mask(int token_count, RandomStream& rng);
Configuration random_step(const Configuration& config, RandomStream& rng);

/// Encodes a configuration as bits with bit_1 = 0. Requires N odd and K odd.
BitRing bits_from_config(const Configuration& config);
Configuration config_from_bits(const BitRing& ring);

/// One synchronous round of the bit protocol. coins[p-1] is process p's coin; only
/// token holders use theirs.
BitRing bit_step(const BitRing& ring, const std::vector<bool>& coins);

/// The token-passing mask that bit_step realises for `config` under `coins`.
MoveMask coupled_mask(const Configuration& config, const std::vector<bool>& coins);

/// Shifts every position by `offset` (mod N).
Configuration rotate_positions(const Configuration& config, int offset);

/// Lexicographically smallest cyclic rotation of the gaps.
GapVector canonical_rotation(const GapVector& gaps);

/// Parses "N=7;tokens=2,3,6" or "N=7;gaps=3,1,3". Whitespace around items is ignored.
Configuration parse_configuration(std::string_view literal);
std::string to_token_literal(const Configuration& config);
std::string to_gap_literal(const GapVector& gaps);
/// Comma-joined gaps, e.g. "3,1,3".
std::string join_gaps(const GapVector& gaps);

}  // namespace herman
