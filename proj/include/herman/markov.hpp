#pragma once

// Exact analysis of the gap-vector Markov chain: one-step transition laws,
// expected stabilization times by exact elimination, and the drift and
// increment-moment identities checked in exact rationals.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "herman/rational.hpp"
#include "herman/ring.hpp"

namespace herman {

/// Per-gap change induced by a mask before any merging:
/// delta[i] = mask[i] - mask[i-1 mod K] (gap i sits between token i-1 and token i).
struct GapIncrement {
  std::vector<int> delta;
};

GapIncrement gap_increment(const MoveMask& mask);

/// Successor gaps after one step. Zero gaps mark annihilated pairs: each zero
/// gap is removed and its two neighbours are merged. The result is not
/// canonicalised and is empty if every token annihilated (even K only).
GapVector step_gaps(const GapVector& g, const MoveMask& mask);

struct TransitionLaw {
  GapVector source;
  /// Canonical successors in ascending order, probabilities summing to 1.
  std::vector<std::pair<GapVector, Rational>> outcomes;
};

/// All 2^K masks, canonicalised and aggregated. K is limited to 24.
TransitionLaw successor_distribution(const GapVector& g);

struct SolverCapacity {
  int exact_max_n = 14;
  int float_max_n = 20;
};

/// Canonical gap vectors of one ring size, indexed.
class StateSpace {
 public:
  StateSpace(int ring_size, std::vector<GapVector> states);

  int ring_size() const { return ring_size_; }
  const std::vector<GapVector>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  std::optional<std::size_t> index_of(const GapVector& canonical) const;

 private:
  int ring_size_;
  std::vector<GapVector> states_;  // sorted by (K, gaps)
  std::map<std::vector<int>, std::size_t> index_;
};

/// Every canonical gap vector with odd K summing to N.
StateSpace full_state_space(int ring_size);
/// Canonical states reachable from g (including g).
StateSpace reachable_state_space(const GapVector& g);

/// Transition laws for every state, computed serially / with OpenMP. Same output.
std::vector<TransitionLaw> transition_laws_serial(const StateSpace& space);
std::vector<TransitionLaw> transition_laws_parallel(const StateSpace& space);

/// Expected stabilization time of every state in a space.
struct ExpectedTimes {
  StateSpace space;
  std::vector<Rational> exact;
  const Rational& at(const GapVector& g) const;
};

struct FloatExpectedTimes {
  StateSpace space;
  std::vector<double> value;
  double max_residual = 0.0;  ///< max over K-levels of ||Ax - b||_inf
  double at(const GapVector& g) const;
};

/// Solves E[T(s)] = 1 + sum_s' p(s,s') E[T(s')] exactly, level by level in K
/// (K never increases, so each level only needs the levels below it).
ExpectedTimes solve_expected_times(StateSpace space);
/// Same system in double via sparse LU, per level.
FloatExpectedTimes solve_expected_times_float(StateSpace space);

/// Exact E T for one state. K must be odd; N above capacity.exact_max_n throws CapacityError.
Rational expected_time_exact(const GapVector& g, const SolverCapacity& capacity = {});
double expected_time_float(const GapVector& g, const SolverCapacity& capacity = {});

/// 4 N^2 / 27.
Rational conjectured_bound(int ring_size);

struct MaxExpectedTime {
  GapVector argmax{3, {3}};
  Rational value;
  Rational bound;
  bool within_bound = false;
};

/// Maximum of E T over all odd-K canonical states of the ring.
MaxExpectedTime max_expected_time(int ring_size, const SolverCapacity& capacity = {});

struct SweepRow {
  GapVector gaps;
  Rational expected_time;
  Rational lyapunov;  ///< V(g)
  bool pass = false;  ///< E T <= 4N^2/27 and E T <= V
};

struct SweepResult {
  int ring_size = 0;
  Rational bound;
  std::vector<SweepRow> rows;
  MaxExpectedTime max;
  bool pass = false;
};

SweepResult sweep_exact(int ring_size, const SolverCapacity& capacity = {});

/// Exact sums over all 2^K masks used by the drift checks.
struct MaskSums {
  std::int64_t masks = 0;
  std::int64_t f3_merged = 0;  ///< sum of f3 over merged successor gaps
  std::int64_t f5_merged = 0;
  std::int64_t f5_raw = 0;     ///< sum of f5(g + delta), zeros retained
};

MaskSums mask_sums(const GapVector& g);

struct DriftCheck {
  Rational lhs;
  Rational rhs;
  bool pass = false;
};

/// E(V3(z')|z) against V3(z) - (K-1)/2.
DriftCheck verify_drift_V3(const GapVector& g);
/// E(V5(z')|z) against V5(z) + (K-1)(K-3)/(32N^2) - (K-3)/2 f3(g/N); K >= 5.
DriftCheck verify_drift_V5(const GapVector& g);

struct RawF5Check {
  Rational raw_expectation;     ///< E f5(g + delta) on the unmerged K-vector
  Rational merged_expectation;  ///< E f5 of the merged successor
  Rational rhs;                 ///< f5(g) - (K-3)/8 f3(g) + (K-1)(K-3)N/128
  bool pass = false;
};

RawF5Check verify_raw_f5_drift(const GapVector& g);

struct DriftBound {
  Rational drift;  ///< E V(z') - V(z)
  bool pass = false;  ///< drift <= -1
};

DriftBound verify_drift_V(const GapVector& g);

/// E V(z') - V(z) against the closed form -(K-1)/2 - (3/4)(K-1)(K-3)/N^2 + 12(K-3) f3(g/N),
/// whose constants are those of alpha = 24. Any other alpha breaks it.
DriftCheck verify_drift_V_identity(const GapVector& g);

/// E[prod_{i in indices} delta_i] by enumeration of the 2^K masks.
Rational delta_moment(int k, std::span<const int> indices);

/// Closed form for a cyclic block of `length` consecutive increments (length <= K, K odd):
/// 0 for odd length, (-1/4)^(length/2) for even length.
Rational block_moment(int length);

struct MomentMismatch {
  std::vector<int> indices;
  Rational enumerated;
  Rational expected;
};

struct MomentTable {
  int k = 0;
  std::size_t single_blocks = 0;
  std::size_t block_pairs = 0;
  std::vector<MomentMismatch> mismatches;
};

/// Every cyclic block and every pair of non-adjacent cyclic blocks for one odd K.
MomentTable verify_moment_table(int k);

struct BoundCheck {
  Rational expected_time;
  Rational lyapunov;
  bool pass = false;  ///< E T <= V, with equality required when K = 3
};

BoundCheck lyapunov_bound_check(const GapVector& g, const SolverCapacity& capacity = {});

/// Random composition of N into K positive parts (uniform over compositions).
GapVector random_gap_vector(int ring_size, int token_count, RandomStream& rng);

struct DriftRecord {
  GapVector gaps;
  DriftCheck v3;
  std::optional<DriftCheck> v5;
  RawF5Check raw_f5;
  DriftBound v;
  DriftCheck v_identity;
  bool pass() const;
};

DriftRecord drift_record(const GapVector& g);
/// One record per state in input order; the parallel variant uses OpenMP.
std::vector<DriftRecord> drift_records_serial(std::span<const GapVector> states);
std::vector<DriftRecord> drift_records_parallel(std::span<const GapVector> states);

}  // namespace herman
