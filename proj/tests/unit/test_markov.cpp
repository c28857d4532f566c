#include "doctest.h"

#include <map>
#include <set>

#include "herman/errors.hpp"
#include "herman/lyapunov.hpp"
#include "herman/markov.hpp"
#include "oracles.hpp"

using namespace herman;

namespace {

// E[prod delta_i] straight from the definition delta_i = b_i - b_{i-1}.
Rational moment_by_hand(int k, const std::vector<int>& idx) {
  Rational total = 0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << k); ++w) {
    std::int64_t prod = 1;
    for (int i : idx) {
      const int b = static_cast<int>((w >> i) & 1U);
      const int prev = static_cast<int>((w >> ((i + k - 1) % k)) & 1U);
      prod *= b - prev;
    }
    total += prod;
  }
  return total / Rational(static_cast<long>(std::uint64_t{1} << k));
}

}  // namespace

TEST_SUITE("markov") {

TEST_CASE("gap increments and merging") {
  // Gap i sits between token i-1 and token i, so it grows when token i moves and
  // shrinks when token i-1 moves.
  const auto inc = gap_increment(MoveMask::from_word(0b001, 3));
  CHECK(inc.delta == std::vector<int>{1, -1, 0});

  const GapVector g(7, {3, 1, 3});
  // Token 0 moves onto token 1 (gap 1 closes): gaps 0 and 2 merge around it.
  const auto next = step_gaps(g, MoveMask::from_word(0b001, 3));
  CHECK(next.token_count() == 1);
  CHECK(next.ring_size() == 7);
  CHECK(step_gaps(g, MoveMask::all(3, true)) == g);

  // Even K can annihilate completely.
  CHECK(step_gaps(GapVector(4, {1, 1, 1, 1}), MoveMask::from_word(0b0101, 4)).token_count() == 0);
}

TEST_CASE("step_gaps agrees with token-level stepping") {
  RandomStream rng(41);
  for (int t = 0; t < 500; ++t) {
    const int k = 1 + 2 * static_cast<int>(rng.below(4));
    std::vector<int> g;
    int n = 0;
    for (int i = 0; i < k; ++i) {
      g.push_back(1 + static_cast<int>(rng.below(3)));
      n += g.back();
    }
    if (n < 3) continue;
    const std::uint64_t w = rng.next_u64() & ((std::uint64_t{1} << k) - 1);
    const auto z = oracle::positions_of(g);
    const auto expected = oracle::min_rotation(oracle::gaps_of(n, oracle::step_positions(n, z, w)));
    const auto got = canonical_rotation(step_gaps(GapVector(n, g), MoveMask::from_word(w, k)));
    CHECK(got.gaps() == expected);
  }
}

TEST_CASE("successor distribution on three unit gaps") {
  const auto law = successor_distribution(GapVector(3, {1, 1, 1}));
  REQUIRE(law.outcomes.size() == 2);
  Rational total = 0;
  for (const auto& [state, p] : law.outcomes) {
    total += p;
    if (state.token_count() == 1) CHECK(p == make_rational(3, 4));
    if (state.token_count() == 3) CHECK(p == make_rational(1, 4));
  }
  CHECK(total == 1);
}

TEST_CASE("successor distributions sum to one and are canonical") {
  const auto space = full_state_space(9);
  for (const auto& s : space.states()) {
    const auto law = successor_distribution(s);
    Rational total = 0;
    for (const auto& [state, p] : law.outcomes) {
      total += p;
      CHECK(canonical_rotation(state) == state);
      CHECK(state.token_count() <= s.token_count());
    }
    CHECK(total == 1);
  }
}

TEST_CASE("state space enumeration") {
  // Odd-K necklaces of N = 7 counted independently by brute force over compositions.
  std::set<std::vector<int>> seen;
  for (std::uint64_t w = 0; w < (1U << 6); ++w) {
    std::vector<int> g;
    int run = 1;
    for (int i = 0; i < 6; ++i) {
      if ((w >> i) & 1U) {
        g.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    g.push_back(run);
    if (g.size() % 2 == 1) seen.insert(oracle::min_rotation(g));
  }
  const auto space = full_state_space(7);
  CHECK(space.size() == seen.size());
  for (const auto& s : space.states()) CHECK(seen.count(s.gaps()) == 1);
  CHECK(space.index_of(GapVector(7, {1, 3, 3})).has_value());
  CHECK_FALSE(space.index_of(GapVector(7, {3, 1, 3})).has_value());
}

TEST_CASE("serial and parallel transition laws are identical") {
  const auto space = full_state_space(9);
  const auto a = transition_laws_serial(space);
  const auto b = transition_laws_parallel(space);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].source == b[i].source);
    CHECK(a[i].outcomes == b[i].outcomes);
  }
}

TEST_CASE("three-token states: E T = 4 g0 g1 g2 / N") {
  RandomStream rng(43);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(rng.below(12));
    const GapVector g = random_gap_vector(n, 3, rng);
    CHECK(expected_time_exact(g) == make_rational(4 * g[0] * g[1] * g[2], n));
  }
}

TEST_CASE("exact solver against the Gauss-Jordan oracle") {
  for (const auto& gaps : std::vector<std::vector<int>>{
           {1, 1, 1, 1, 3}, {1, 2, 1, 2, 2}, {2, 1, 1, 1, 2, 1, 1}, {1, 1, 1, 1, 1, 1, 1, 1, 1}}) {
    int n = 0;
    for (int v : gaps) n += v;
    CAPTURE(n);
    CHECK(expected_time_exact(GapVector(n, gaps)) == oracle::expected_time(n, gaps));
  }
}

TEST_CASE("expected time depends only on the rotation class") {
  // Unquotiented chain on every token set of a 7-ring, solved by
  // Gauss-Jordan. Each odd-K set must match the canonical solver on its gap vector.
  const int n = 7;
  const std::size_t states = std::size_t{1} << n;
  auto positions = [&](std::size_t set) {
    std::vector<int> z;
    for (int p = 1; p <= n; ++p) {
      if ((set >> (p - 1)) & 1U) z.push_back(p);
    }
    return z;
  };
  std::vector<std::vector<Rational>> a(states, std::vector<Rational>(states + 1, Rational(0)));
  for (std::size_t s = 0; s < states; ++s) {
    a[s][s] = 1;
    const auto z = positions(s);
    if (z.size() <= 1) continue;
    const std::uint64_t masks = std::uint64_t{1} << z.size();
    for (std::uint64_t m = 0; m < masks; ++m) {
      std::size_t next = 0;
      for (int p : oracle::step_positions(n, z, m)) next |= std::size_t{1} << (p - 1);
      a[s][next] -= make_rational(1, static_cast<std::int64_t>(masks));
    }
    a[s][states] = 1;
  }
  for (std::size_t c = 0; c < states; ++c) {
    std::size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    const Rational inv = 1 / a[c][c];
    for (auto& v : a[c]) v *= inv;
    for (std::size_t r = 0; r < states; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational factor = a[r][c];
      for (std::size_t j = c; j <= states; ++j) a[r][j] -= factor * a[c][j];
    }
  }
  for (std::size_t s = 1; s < states; ++s) {
    const auto z = positions(s);
    if (z.size() % 2 == 0) continue;
    CHECK(a[s][states] == expected_time_exact(GapVector(n, oracle::gaps_of(n, z))));
  }
}

TEST_CASE("float solver tracks the exact one") {
  const auto exact = solve_expected_times(full_state_space(10));
  const auto approx = solve_expected_times_float(full_state_space(10));
  REQUIRE(exact.space.size() == approx.space.size());
  for (std::size_t i = 0; i < exact.exact.size(); ++i) {
    CHECK(approx.value[i] == doctest::Approx(exact.exact[i].get_d()).epsilon(1e-10));
  }
  CHECK(approx.max_residual <= 1e-9);
}

TEST_CASE("single token and capacity") {
  CHECK(expected_time_exact(GapVector(5, {5})) == 0);
  CHECK_THROWS_AS(expected_time_exact(GapVector(8, {2, 2, 2, 2})), InvalidArgument);
  CHECK_THROWS_AS(expected_time_exact(GapVector(15, {5, 5, 5})), CapacityError);
  CHECK(expected_time_exact(GapVector(15, {5, 5, 5}), SolverCapacity{15, 20}) == make_rational(100, 3));
  CHECK(expected_time_float(GapVector(18, {6, 6, 6})) == doctest::Approx(48.0));
  CHECK_THROWS_AS(expected_time_float(GapVector(21, {7, 7, 7})), CapacityError);
}

TEST_CASE("maximum over a ring") {
  const auto m = max_expected_time(9);
  CHECK(m.value == 12);
  CHECK(m.argmax == GapVector(9, {3, 3, 3}));
  CHECK(m.bound == 12);
  CHECK(m.within_bound);
  CHECK(conjectured_bound(12) == make_rational(64, 3));
}

TEST_CASE("drift identities on random states") {
  RandomStream rng(47);
  for (int k = 3; k <= 9; k += 2) {
    for (int t = 0; t < 15; ++t) {
      const int n = k + static_cast<int>(rng.below(12));
      const auto rec = drift_record(random_gap_vector(n, k, rng));
      CAPTURE(join_gaps(rec.gaps));
      CHECK(rec.v3.pass);
      CHECK(rec.v5.has_value() == (k >= 5));
      if (rec.v5) CHECK(rec.v5->pass);
      CHECK(rec.raw_f5.pass);
      CHECK(rec.v.pass);
      CHECK(rec.v_identity.pass);
    }
  }
}

TEST_CASE("V3 drift from first principles on one state") {
  // E V3(z') by explicit enumeration of token steps, without mask_sums.
  const std::vector<int> g{2, 1, 3, 1, 2};
  const int n = 9;
  const auto z = oracle::positions_of(g);
  Rational total = 0;
  for (std::uint64_t w = 0; w < 32; ++w) {
    const auto next = oracle::gaps_of(n, oracle::step_positions(n, z, w));
    std::vector<Rational> x;
    for (int v : next) x.push_back(make_rational(v, n));
    total += 4 * Rational(n * n) * oracle::f3(x);
  }
  const GapVector gv(n, g);
  CHECK(total / 32 == V3(gv) - 2);
  CHECK(verify_drift_V3(gv).lhs == total / 32);
}

TEST_CASE("moments") {
  CHECK(block_moment(1) == 0);
  CHECK(block_moment(2) == make_rational(-1, 4));
  CHECK(block_moment(4) == make_rational(1, 16));
  for (int k = 3; k <= 7; k += 2) {
    for (const auto& idx : std::vector<std::vector<int>>{{0}, {0, 1}, {0, 1, 2}, {1, 2}, {0, 2}}) {
      if (idx.back() >= k) continue;
      CHECK(delta_moment(k, idx) == moment_by_hand(k, idx));
    }
    const auto table = verify_moment_table(k);
    CHECK(table.mismatches.empty());
    CHECK(table.single_blocks == static_cast<std::size_t>(k * k));
  }
  // Non-adjacent blocks factor: E[d0 d1 d3 d4] = (-1/4)^2 at K = 7.
  CHECK(delta_moment(7, std::vector<int>{0, 1, 3, 4}) == make_rational(1, 16));
  CHECK_THROWS_AS(verify_moment_table(4), InvalidArgument);
}

TEST_CASE("Lyapunov bound on expected time") {
  const auto three = lyapunov_bound_check(GapVector(10, {2, 3, 5}));
  CHECK(three.pass);
  CHECK(three.expected_time == three.lyapunov);
  const auto space = full_state_space(11);
  for (const auto& s : space.states()) {
    if (s.token_count() < 3) continue;
    CHECK(lyapunov_bound_check(s).pass);
  }
}

TEST_CASE("sweep") {
  const auto sweep = sweep_exact(9);
  CHECK(sweep.pass);
  CHECK(sweep.max.value == 12);
  CHECK(sweep.rows.size() == full_state_space(9).size());
}

TEST_CASE("random gap vectors") {
  RandomStream rng(53);
  std::map<std::vector<int>, int> counts;
  for (int t = 0; t < 6000; ++t) {
    const auto g = random_gap_vector(6, 3, rng);
    int sum = 0;
    for (int v : g.gaps()) {
      CHECK(v >= 1);
      sum += v;
    }
    CHECK(sum == 6);
    ++counts[g.gaps()];
  }
  // 10 compositions of 6 into 3 parts, each about 600 times.
  CHECK(counts.size() == 10);
  for (const auto& [g, c] : counts) CHECK(std::abs(c - 600) < 120);
}

TEST_CASE("serial and parallel drift records agree") {
  RandomStream rng(59);
  std::vector<GapVector> states;
  for (int t = 0; t < 30; ++t) states.push_back(random_gap_vector(15, 5, rng));
  const auto a = drift_records_serial(states);
  const auto b = drift_records_parallel(states);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].gaps == b[i].gaps);
    CHECK(a[i].v.drift == b[i].v.drift);
  }
}

}
