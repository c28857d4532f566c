#include "doctest.h"

#include <set>

#include "herman/errors.hpp"
#include "herman/random_stream.hpp"
#include "herman/ring.hpp"
#include "oracles.hpp"

using namespace herman;

TEST_SUITE("ring") {

TEST_CASE("SplitMix64 reference output") {
  // First outputs of SplitMix64 seeded with 0, as published with the generator.
  RandomStream s(0);
  CHECK(s.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(s.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(s.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("coins are the bits of one word, least significant first") {
  RandomStream words(99);
  RandomStream coins(99);
  for (int w = 0; w < 3; ++w) {
    const auto word = words.next_u64();
    for (int i = 0; i < 64; ++i) CHECK(coins.coin() == (((word >> i) & 1U) != 0));
  }
}

TEST_CASE("derived streams") {
  auto a = derive_stream(42, 7);
  RandomStream b(mix64(42 ^ mix64(7)));
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(derive_stream(1, i).next_u64());
  CHECK(firsts.size() == 1000);
}

TEST_CASE("below and uniform stay in range") {
  RandomStream s(3);
  for (int i = 0; i < 10000; ++i) {
    CHECK(s.below(7) < 7);
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gap vector of a small configuration") {
  const Configuration c(7, {2, 3, 6});
  CHECK(gap_vector(c).gaps() == std::vector<int>{3, 1, 3});
  CHECK(gap_vector(Configuration(5, {4})).gaps() == std::vector<int>{5});
  CHECK(gap_vector(Configuration(5, {})).gaps().empty());
}

TEST_CASE("config_from_gaps inverts gap_vector up to rotation") {
  RandomStream rng(11);
  for (int t = 0; t < 200; ++t) {
    const int n = 3 + static_cast<int>(rng.below(20));
    std::vector<int> z;
    for (int p = 1; p <= n; ++p) {
      if (rng.coin()) z.push_back(p);
    }
    if (z.empty()) continue;
    const Configuration c(n, z);
    const GapVector g = gap_vector(c);
    const Configuration back = config_from_gaps(g);
    CHECK(back.positions().front() == 1);
    CHECK(gap_vector(back) == g);
    CHECK(gap_vector(rotate_positions(back, z.front() - 1)) == g);
  }
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(Configuration(2, {1}), InvalidArgument);
  CHECK_THROWS_AS(Configuration(7, {3, 2}), InvalidArgument);
  CHECK_THROWS_AS(Configuration(7, {2, 2}), InvalidArgument);
  CHECK_THROWS_AS(Configuration(7, {0, 3}), InvalidArgument);
  CHECK_THROWS_AS(Configuration(7, {8}), InvalidArgument);
  CHECK_THROWS_AS(GapVector(7, {3, 0, 4}), InvalidArgument);
  CHECK_THROWS_AS(GapVector(7, {3, 3}), InvalidArgument);
}

TEST_CASE("apply_step examples") {
  const Configuration c(3, {1, 2, 3});
  // Token 1 steps onto token 2: both vanish.
  CHECK(apply_step(c, MoveMask::from_word(0b001, 3)).positions() == std::vector<int>{3});
  CHECK(apply_step(c, MoveMask::from_word(0b111, 3)).positions() == std::vector<int>{1, 2, 3});
  CHECK(apply_step(c, MoveMask::from_word(0b000, 3)).positions() == std::vector<int>{1, 2, 3});
  // Token at N wraps to process 1.
  CHECK(apply_step(Configuration(5, {5}), MoveMask::all(1, true)).positions() ==
        std::vector<int>{1});
  CHECK_THROWS_AS(apply_step(c, MoveMask::from_word(0, 2)), InvalidArgument);
}

TEST_CASE("apply_step agrees with the counting oracle") {
  RandomStream rng(5);
  for (int t = 0; t < 500; ++t) {
    const int n = 3 + static_cast<int>(rng.below(14));
    std::vector<int> z;
    for (int p = 1; p <= n; ++p) {
      if (rng.coin()) z.push_back(p);
    }
    const std::uint64_t word = rng.next_u64();
    const auto got = apply_step(Configuration(n, z), MoveMask::from_word(word, z.size()));
    CHECK(got.positions() == oracle::step_positions(n, z, word));
  }
}

TEST_CASE("token count never grows and keeps its parity") {
  RandomStream rng(8);
  for (int t = 0; t < 300; ++t) {
    const int n = 3 + static_cast<int>(rng.below(14));
    std::vector<int> z;
    for (int p = 1; p <= n; ++p) {
      if (rng.coin()) z.push_back(p);
    }
    const Configuration c(n, z);
    const Configuration next = random_step(c, rng);
    CHECK(next.token_count() <= c.token_count());
    CHECK((c.token_count() - next.token_count()) % 2 == 0);
  }
}

TEST_CASE("bit encoding") {
  const Configuration c(7, {2, 3, 6});
  const BitRing r = bits_from_config(c);
  CHECK(r.bits[0] == false);
  CHECK(config_from_bits(r) == c);
  CHECK_THROWS_AS(bits_from_config(Configuration(6, {1, 2, 3})), InvalidArgument);
  CHECK_THROWS_AS(bits_from_config(Configuration(7, {1, 2})), InvalidArgument);

  // Every bit string of an odd ring encodes an odd number of tokens.
  for (unsigned w = 0; w < (1U << 7); ++w) {
    BitRing b{std::vector<bool>(7)};
    for (int i = 0; i < 7; ++i) b.bits[i] = ((w >> i) & 1U) != 0;
    const Configuration z = config_from_bits(b);
    CHECK(z.token_count() % 2 == 1);
    const BitRing back = bits_from_config(z);
    // Equal up to complement: the encoding fixes bit_1 = 0.
    BitRing flipped = b;
    for (std::size_t i = 0; i < 7; ++i) flipped.bits[i] = !b.bits[i];
    CHECK((back == b || back == flipped));
  }
}

TEST_CASE("bit_step matches coupled token passing on a hand example") {
  // bits 0,0,1: only process 2 has a bit equal to its left neighbour's.
  const BitRing r{{false, false, true}};
  const Configuration z = config_from_bits(r);
  CHECK(z.positions() == std::vector<int>{2});
  const std::vector<bool> coins{false, true, false};
  const BitRing next = bit_step(r, coins);
  CHECK(next.bits == std::vector<bool>{false, true, true});
  CHECK(config_from_bits(next).positions() == std::vector<int>{3});
  CHECK(apply_step(z, coupled_mask(z, coins)) == config_from_bits(next));
}

TEST_CASE("canonical rotation is the lexicographic minimum") {
  RandomStream rng(21);
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng.below(7));
    std::vector<int> g;
    int n = 0;
    for (int i = 0; i < k; ++i) {
      g.push_back(1 + static_cast<int>(rng.below(4)));
      n += g.back();
    }
    if (n < 3) continue;
    CHECK(canonical_rotation(GapVector(n, g)).gaps() == oracle::min_rotation(g));
  }
}

TEST_CASE("configuration literals") {
  CHECK(parse_configuration("N=7;tokens=2,3,6") == Configuration(7, {2, 3, 6}));
  CHECK(parse_configuration(" N = 7 ; gaps = 3, 1, 3 ") == Configuration(7, {1, 2, 5}));
  CHECK(gap_vector(parse_configuration("N=7;gaps=3,1,3")).gaps() == std::vector<int>{3, 1, 3});
  CHECK(to_token_literal(Configuration(7, {2, 3, 6})) == "N=7;tokens=2,3,6");
  CHECK(to_gap_literal(GapVector(9, {3, 3, 3})) == "N=9;gaps=3,3,3");
  CHECK(join_gaps(GapVector(9, {3, 3, 3})) == "3,3,3");
  CHECK_THROWS_AS(parse_configuration("N=7"), InvalidArgument);
  CHECK_THROWS_AS(parse_configuration("N=7;gaps=3,1,3;tokens=1"), InvalidArgument);
  CHECK_THROWS_AS(parse_configuration("N=7;gaps=3,1,4"), InvalidArgument);
  CHECK_THROWS_AS(parse_configuration("N=x;gaps=3"), InvalidArgument);
  CHECK_THROWS_AS(parse_configuration("M=7;gaps=7"), InvalidArgument);
  CHECK_THROWS_AS(parse_configuration("N=7;tokens=1,,2"), InvalidArgument);
}

}
