#include "herman/markov.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>

#include "herman/errors.hpp"
#include "herman/lyapunov.hpp"

namespace herman {

namespace {

constexpr int kMaxMaskBits = 24;

void require_odd_tokens(const GapVector& g, const char* what) {
  if (g.token_count() % 2 == 0) {
    throw InvalidArgument(std::string(what) + " requires an odd number of tokens (got K=" +
                          std::to_string(g.token_count()) + ")");
  }
}

int token_count_of(const std::vector<int>& gaps) { return static_cast<int>(gaps.size()); }

/// Merges zero gaps into their neighbours. `raw` may contain zeros but never two
/// adjacent ones.
std::vector<int> merge_zero_gaps(const std::vector<int>& raw) {
  const int k = token_count_of(raw);
  int start = -1;
  for (int s = 0; s < k; ++s) {
    if (raw[s] > 0 && raw[(s + k - 1) % k] > 0) {
      start = s;
      break;
    }
  }
  if (start < 0) {
    // Zeros strictly alternate with positive gaps: every token annihilated.
    return {};
  }
  std::vector<int> out;
  out.reserve(raw.size());
  bool merge_next = false;
  for (int j = 0; j < k; ++j) {
    const int value = raw[(start + j) % k];
    if (value == 0) {
      merge_next = true;
    } else if (merge_next) {
      out.back() += value;
      merge_next = false;
    } else {
      out.push_back(value);
    }
  }
  return out;
}

std::vector<int> raw_successor(const std::vector<int>& gaps, std::uint64_t mask_word) {
  const int k = token_count_of(gaps);
  std::vector<int> raw(gaps);
  for (int i = 0; i < k; ++i) {
    const int here = static_cast<int>((mask_word >> i) & 1U);
    const int prev = static_cast<int>((mask_word >> ((i + k - 1) % k)) & 1U);
    raw[i] += here - prev;
  }
  return raw;
}

void require_mask_width(int k) {
  if (k > kMaxMaskBits) {
    throw CapacityError("mask enumeration limited to K <= " + std::to_string(kMaxMaskBits));
  }
}

/// Dense exact Gaussian elimination, solving A x = b in place. A is square and
/// nonsingular (rows of I - P restricted to one transient level).
std::vector<Rational> solve_dense(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) throw std::runtime_error("singular transition system");
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
    }
    const Rational inv = 1 / a[col][col];
    for (std::size_t j = col; j < n; ++j) a[col][j] *= inv;
    b[col] *= inv;
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || sgn(a[row][col]) == 0) continue;
      const Rational factor = a[row][col];
      for (std::size_t j = col; j < n; ++j) {
        if (sgn(a[col][j]) != 0) a[row][j] -= factor * a[col][j];
      }
      b[row] -= factor * b[col];
    }
  }
  return b;
}

void enumerate_compositions(int remaining, int parts, std::vector<int>& prefix,
                            const std::function<void(const std::vector<int>&)>& emit) {
  if (parts == 0) {
    if (remaining == 0) emit(prefix);
    return;
  }
  for (int g = 1; g <= remaining - (parts - 1); ++g) {
    prefix.push_back(g);
    enumerate_compositions(remaining - g, parts - 1, prefix, emit);
    prefix.pop_back();
  }
}

std::vector<std::size_t> level_members(const StateSpace& space, int k) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.states()[i].token_count() == k) out.push_back(i);
  }
  return out;
}

std::vector<int> levels_of(const StateSpace& space) {
  std::set<int> ks;
  for (const auto& s : space.states()) ks.insert(s.token_count());
  return {ks.begin(), ks.end()};
}

}  // namespace

GapIncrement gap_increment(const MoveMask& mask) {
  const std::size_t k = mask.size();
  GapIncrement inc;
  inc.delta.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    inc.delta[i] = static_cast<int>(mask[i]) - static_cast<int>(mask[(i + k - 1) % k]);
  }
  return inc;
}

GapVector step_gaps(const GapVector& g, const MoveMask& mask) {
  if (mask.size() != g.gaps().size()) throw InvalidArgument("mask length must equal token count");
  const auto inc = gap_increment(mask);
  std::vector<int> raw(g.gaps());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += inc.delta[i];
  return GapVector(g.ring_size(), merge_zero_gaps(raw));
}

TransitionLaw successor_distribution(const GapVector& g) {
  const int k = g.token_count();
  require_mask_width(k);
  std::map<GapVector, std::int64_t> counts;
  const std::uint64_t masks = std::uint64_t{1} << k;
  for (std::uint64_t w = 0; w < masks; ++w) {
    GapVector next(g.ring_size(), merge_zero_gaps(raw_successor(g.gaps(), w)));
    ++counts[canonical_rotation(next)];
  }
  TransitionLaw law{g, {}};
  law.outcomes.reserve(counts.size());
  for (auto& [state, count] : counts) {
    Rational p(mpz_class(static_cast<long>(count)), mpz_class(1) << k);
    p.canonicalize();
    law.outcomes.emplace_back(state, std::move(p));
  }
  return law;
}

StateSpace::StateSpace(int ring_size, std::vector<GapVector> states)
    : ring_size_(ring_size), states_(std::move(states)) {
  std::sort(states_.begin(), states_.end(), [](const GapVector& a, const GapVector& b) {
    if (a.token_count() != b.token_count()) return a.token_count() < b.token_count();
    return a.gaps() < b.gaps();
  });
  states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i].gaps(), i);
}

std::optional<std::size_t> StateSpace::index_of(const GapVector& canonical) const {
  auto it = index_.find(canonical.gaps());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StateSpace full_state_space(int ring_size) {
  std::vector<GapVector> states;
  std::vector<int> prefix;
  for (int k = 1; k <= ring_size; k += 2) {
    enumerate_compositions(ring_size, k, prefix, [&](const std::vector<int>& gaps) {
      GapVector g(ring_size, gaps);
      if (canonical_rotation(g) == g) states.push_back(std::move(g));
    });
  }
  return StateSpace(ring_size, std::move(states));
}

StateSpace reachable_state_space(const GapVector& g) {
  std::set<GapVector> seen{canonical_rotation(g)};
  std::deque<GapVector> frontier{canonical_rotation(g)};
  while (!frontier.empty()) {
    const GapVector current = frontier.front();
    frontier.pop_front();
    for (auto& [next, p] : successor_distribution(current).outcomes) {
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  return StateSpace(g.ring_size(), {seen.begin(), seen.end()});
}

std::vector<TransitionLaw> transition_laws_serial(const StateSpace& space) {
  std::vector<TransitionLaw> laws;
  laws.reserve(space.size());
  for (const auto& s : space.states()) laws.push_back(successor_distribution(s));
  return laws;
}

std::vector<TransitionLaw> transition_laws_parallel(const StateSpace& space) {
  const auto n = static_cast<std::int64_t>(space.size());
  std::vector<std::optional<TransitionLaw>> slots(space.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    slots[i] = successor_distribution(space.states()[i]);
  }
  std::vector<TransitionLaw> laws;
  laws.reserve(space.size());
  for (auto& s : slots) laws.push_back(std::move(*s));
  return laws;
}

const Rational& ExpectedTimes::at(const GapVector& g) const {
  const auto idx = space.index_of(canonical_rotation(g));
  if (!idx) throw InvalidArgument("state " + to_gap_literal(g) + " is not in the solved space");
  return exact[*idx];
}

double FloatExpectedTimes::at(const GapVector& g) const {
  const auto idx = space.index_of(canonical_rotation(g));
  if (!idx) throw InvalidArgument("state " + to_gap_literal(g) + " is not in the solved space");
  return value[*idx];
}

ExpectedTimes solve_expected_times(StateSpace space) {
  const auto laws = transition_laws_parallel(space);
  std::vector<Rational> times(space.size());
  for (int k : levels_of(space)) {
    if (k % 2 == 0) throw InvalidArgument("state space contains an even token count");
    const auto members = level_members(space, k);
    if (k == 1) continue;  // absorbing: E T = 0
    std::map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < members.size(); ++i) local.emplace(members[i], i);
    const std::size_t n = members.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    std::vector<Rational> b(n, Rational(1));
    for (std::size_t r = 0; r < n; ++r) {
      a[r][r] = 1;
      for (const auto& [next, p] : laws[members[r]].outcomes) {
        const std::size_t j = *space.index_of(next);
        if (auto it = local.find(j); it != local.end()) {
          a[r][it->second] -= p;  // self-loops land on the diagonal: 1 - p_self
        } else {
          b[r] += p * times[j];
        }
      }
    }
    const auto x = solve_dense(std::move(a), std::move(b));
    for (std::size_t r = 0; r < n; ++r) times[members[r]] = x[r];
  }
  return ExpectedTimes{std::move(space), std::move(times)};
}

FloatExpectedTimes solve_expected_times_float(StateSpace space) {
  const auto laws = transition_laws_parallel(space);
  std::vector<double> times(space.size(), 0.0);
  double worst_residual = 0.0;
  for (int k : levels_of(space)) {
    if (k % 2 == 0) throw InvalidArgument("state space contains an even token count");
    if (k == 1) continue;
    const auto members = level_members(space, k);
    std::map<std::size_t, Eigen::Index> local;
    for (std::size_t i = 0; i < members.size(); ++i) {
      local.emplace(members[i], static_cast<Eigen::Index>(i));
    }
    const auto n = static_cast<Eigen::Index>(members.size());
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      entries.emplace_back(r, r, 1.0);
      for (const auto& [next, p] : laws[members[r]].outcomes) {
        const std::size_t j = *space.index_of(next);
        if (auto it = local.find(j); it != local.end()) {
          entries.emplace_back(r, it->second, -p.get_d());
        } else {
          b[r] += p.get_d() * times[j];
        }
      }
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU factorisation failed");
    const Eigen::VectorXd x = lu.solve(b);
    worst_residual = std::max(worst_residual, (a * x - b).cwiseAbs().maxCoeff());
    for (Eigen::Index r = 0; r < n; ++r) times[members[r]] = x[r];
  }
  return FloatExpectedTimes{std::move(space), std::move(times), worst_residual};
}

Rational expected_time_exact(const GapVector& g, const SolverCapacity& capacity) {
  require_odd_tokens(g, "expected stabilization time");
  if (g.ring_size() > capacity.exact_max_n) {
    throw CapacityError("exact solver capacity is N <= " + std::to_string(capacity.exact_max_n) +
                        " (got N=" + std::to_string(g.ring_size()) + ")");
  }
  if (g.token_count() == 1) return Rational(0);
  return solve_expected_times(reachable_state_space(g)).at(g);
}

double expected_time_float(const GapVector& g, const SolverCapacity& capacity) {
  require_odd_tokens(g, "expected stabilization time");
  if (g.ring_size() > capacity.float_max_n) {
    throw CapacityError("float solver capacity is N <= " + std::to_string(capacity.float_max_n) +
                        " (got N=" + std::to_string(g.ring_size()) + ")");
  }
  if (g.token_count() == 1) return 0.0;
  const auto solved = solve_expected_times_float(reachable_state_space(g));
  if (!(solved.max_residual <= 1e-9)) {
    throw std::runtime_error("float solve residual " + std::to_string(solved.max_residual) +
                             " exceeds 1e-9");
  }
  return solved.at(g);
}

Rational conjectured_bound(int ring_size) {
  return make_rational(4LL * ring_size * ring_size, 27);
}

namespace {

MaxExpectedTime argmax_of(const ExpectedTimes& solved) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < solved.space.size(); ++i) {
    if (!best || solved.exact[i] > solved.exact[*best]) best = i;
  }
  const int n = solved.space.ring_size();
  MaxExpectedTime out{solved.space.states()[*best], solved.exact[*best], conjectured_bound(n),
                      false};
  out.within_bound = out.value <= out.bound;
  return out;
}

void require_exact_capacity(int ring_size, const SolverCapacity& capacity) {
  if (ring_size < 3) throw InvalidArgument("ring size must be at least 3");
  if (ring_size > capacity.exact_max_n) {
    throw CapacityError("exact solver capacity is N <= " + std::to_string(capacity.exact_max_n) +
                        " (got N=" + std::to_string(ring_size) + ")");
  }
}

}  // namespace

MaxExpectedTime max_expected_time(int ring_size, const SolverCapacity& capacity) {
  require_exact_capacity(ring_size, capacity);
  return argmax_of(solve_expected_times(full_state_space(ring_size)));
}

SweepResult sweep_exact(int ring_size, const SolverCapacity& capacity) {
  require_exact_capacity(ring_size, capacity);
  const auto solved = solve_expected_times(full_state_space(ring_size));
  SweepResult out;
  out.ring_size = ring_size;
  out.bound = conjectured_bound(ring_size);
  out.pass = true;
  for (std::size_t i = 0; i < solved.space.size(); ++i) {
    const auto& g = solved.space.states()[i];
    SweepRow row{g, solved.exact[i], V(g), false};
    row.pass = row.expected_time <= out.bound && row.expected_time <= row.lyapunov;
    out.pass = out.pass && row.pass;
    out.rows.push_back(std::move(row));
  }
  out.max = argmax_of(solved);
  return out;
}

MaskSums mask_sums(const GapVector& g) {
  const int k = g.token_count();
  require_mask_width(k);
  MaskSums sums;
  sums.masks = std::int64_t{1} << k;
  for (std::uint64_t w = 0; w < static_cast<std::uint64_t>(sums.masks); ++w) {
    const auto raw = raw_successor(g.gaps(), w);
    const auto merged = merge_zero_gaps(raw);
    sums.f3_merged += f3_of_gaps(merged);
    sums.f5_merged += f5_of_gaps(merged);
    sums.f5_raw += f5_of_gaps(raw);
  }
  return sums;
}

namespace {

Rational ratio(std::int64_t num, const mpz_class& den) {
  Rational r(mpz_class(static_cast<long>(num)), den);
  r.canonicalize();
  return r;
}

}  // namespace

DriftCheck verify_drift_V3(const GapVector& g) {
  require_odd_tokens(g, "V3 drift");
  const int k = g.token_count();
  const mpz_class n = g.ring_size();
  const auto sums = mask_sums(g);
  DriftCheck out;
  out.lhs = ratio(4 * sums.f3_merged, n * sums.masks);
  out.rhs = V3(g) - make_rational(k - 1, 2);
  out.pass = out.lhs == out.rhs;
  return out;
}

DriftCheck verify_drift_V5(const GapVector& g) {
  require_odd_tokens(g, "V5 drift");
  const int k = g.token_count();
  if (k < 5) throw InvalidArgument("V5 drift identity needs K >= 5");
  const std::int64_t n = g.ring_size();
  const auto sums = mask_sums(g);
  DriftCheck out;
  out.lhs = ratio(4 * sums.f5_merged, mpz_class(static_cast<long>(n * n * n)) * sums.masks);
  out.rhs = V5(g) + make_rational(static_cast<std::int64_t>(k - 1) * (k - 3), 32 * n * n) -
            make_rational(k - 3, 2) * make_rational(f3_of_gaps(g.gaps()), n * n * n);
  out.pass = out.lhs == out.rhs;
  return out;
}

RawF5Check verify_raw_f5_drift(const GapVector& g) {
  require_odd_tokens(g, "f5 increment identity");
  const int k = g.token_count();
  const std::int64_t n = g.ring_size();
  const auto sums = mask_sums(g);
  const mpz_class masks = static_cast<long>(sums.masks);
  RawF5Check out;
  out.raw_expectation = ratio(sums.f5_raw, masks);
  out.merged_expectation = ratio(sums.f5_merged, masks);
  out.rhs = Rational(static_cast<long>(f5_of_gaps(g.gaps()))) -
            make_rational(k - 3, 8) * Rational(static_cast<long>(f3_of_gaps(g.gaps()))) +
            make_rational(static_cast<std::int64_t>(k - 1) * (k - 3) * n, 128);
  out.pass = out.raw_expectation == out.rhs && out.merged_expectation == out.raw_expectation;
  return out;
}

namespace {

Rational expected_V_next(const GapVector& g, const MaskSums& sums) {
  const std::int64_t n = g.ring_size();
  const mpz_class masks = static_cast<long>(sums.masks);
  return ratio(4 * sums.f3_merged, n * masks) -
         Rational(kAlpha) * ratio(4 * sums.f5_merged, mpz_class(static_cast<long>(n * n * n)) * masks);
}

}  // namespace

DriftBound verify_drift_V(const GapVector& g) {
  require_odd_tokens(g, "V drift");
  const auto sums = mask_sums(g);
  DriftBound out;
  out.drift = expected_V_next(g, sums) - V(g);
  out.pass = out.drift <= -1;
  return out;
}

DriftCheck verify_drift_V_identity(const GapVector& g) {
  require_odd_tokens(g, "V drift");
  const int k = g.token_count();
  const std::int64_t n = g.ring_size();
  const auto sums = mask_sums(g);
  DriftCheck out;
  out.lhs = expected_V_next(g, sums) - V(g);
  out.rhs = -make_rational(k - 1, 2) -
            make_rational(3LL * (k - 1) * (k - 3), 4 * n * n) +
            Rational(12 * (k - 3)) * make_rational(f3_of_gaps(g.gaps()), n * n * n);
  out.pass = out.lhs == out.rhs;
  return out;
}

Rational delta_moment(int k, std::span<const int> indices) {
  if (k < 1) throw InvalidArgument("K must be positive");
  require_mask_width(k);
  for (int i : indices) {
    if (i < 0 || i >= k) throw InvalidArgument("increment index out of range");
  }
  std::int64_t total = 0;
  const std::uint64_t masks = std::uint64_t{1} << k;
  for (std::uint64_t w = 0; w < masks; ++w) {
    std::int64_t prod = 1;
    for (int i : indices) {
      const int here = static_cast<int>((w >> i) & 1U);
      const int prev = static_cast<int>((w >> ((i + k - 1) % k)) & 1U);
      prod *= here - prev;
      if (prod == 0) break;
    }
    total += prod;
  }
  Rational out(mpz_class(static_cast<long>(total)), mpz_class(1) << k);
  out.canonicalize();
  return out;
}

Rational block_moment(int length) {
  if (length < 1) throw InvalidArgument("block length must be positive");
  if (length % 2 == 1) return Rational(0);
  Rational out(1);
  for (int i = 0; i < length / 2; ++i) out *= make_rational(-1, 4);
  return out;
}

MomentTable verify_moment_table(int k) {
  if (k < 3 || k % 2 == 0) throw InvalidArgument("moment table needs odd K >= 3");
  MomentTable table;
  table.k = k;
  auto record = [&](std::vector<int> indices, const Rational& expected) {
    const Rational got = delta_moment(k, indices);
    if (got != expected) table.mismatches.push_back({std::move(indices), got, expected});
  };
  for (int start = 0; start < k; ++start) {
    for (int len = 1; len <= k; ++len) {
      std::vector<int> idx;
      for (int j = 0; j < len; ++j) idx.push_back((start + j) % k);
      record(std::move(idx), block_moment(len));
      ++table.single_blocks;
    }
  }
  // Two blocks separated by at least one index on both sides.
  for (int start = 0; start < k; ++start) {
    for (int a = 1; a <= k - 3; ++a) {
      for (int gap = 1; a + gap + 1 + 1 <= k; ++gap) {
        for (int b = 1; a + gap + b + 1 <= k; ++b) {
          std::vector<int> idx;
          for (int j = 0; j < a; ++j) idx.push_back((start + j) % k);
          for (int j = 0; j < b; ++j) idx.push_back((start + a + gap + j) % k);
          record(std::move(idx), block_moment(a) * block_moment(b));
          ++table.block_pairs;
        }
      }
    }
  }
  return table;
}

BoundCheck lyapunov_bound_check(const GapVector& g, const SolverCapacity& capacity) {
  BoundCheck out;
  out.expected_time = expected_time_exact(g, capacity);
  out.lyapunov = V(g);
  out.pass = g.token_count() == 3 ? out.expected_time == out.lyapunov
                                  : out.expected_time <= out.lyapunov;
  return out;
}

GapVector random_gap_vector(int ring_size, int token_count, RandomStream& rng) {
  if (token_count < 1 || token_count > ring_size) {
    throw InvalidArgument("need 1 <= K <= N for a gap vector");
  }
  // Choose K-1 distinct cut points in 1..N-1 (partial Fisher-Yates).
  std::vector<int> pool(static_cast<std::size_t>(ring_size - 1));
  for (int i = 0; i < ring_size - 1; ++i) pool[i] = i + 1;
  for (int i = 0; i < token_count - 1; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(ring_size - 1 - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> cuts(pool.begin(), pool.begin() + (token_count - 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> gaps;
  int prev = 0;
  for (int c : cuts) {
    gaps.push_back(c - prev);
    prev = c;
  }
  gaps.push_back(ring_size - prev);
  return GapVector(ring_size, std::move(gaps));
}

bool DriftRecord::pass() const {
  return v3.pass && (!v5 || v5->pass) && raw_f5.pass && v.pass && v_identity.pass;
}

DriftRecord drift_record(const GapVector& g) {
  DriftRecord r{g, verify_drift_V3(g), std::nullopt, verify_raw_f5_drift(g), verify_drift_V(g),
                verify_drift_V_identity(g)};
  if (g.token_count() >= 5) r.v5 = verify_drift_V5(g);
  return r;
}

std::vector<DriftRecord> drift_records_serial(std::span<const GapVector> states) {
  std::vector<DriftRecord> out;
  out.reserve(states.size());
  for (const auto& g : states) out.push_back(drift_record(g));
  return out;
}

std::vector<DriftRecord> drift_records_parallel(std::span<const GapVector> states) {
  const auto n = static_cast<std::int64_t>(states.size());
  std::vector<std::optional<DriftRecord>> slots(states.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) slots[i] = drift_record(states[i]);
  std::vector<DriftRecord> out;
  out.reserve(states.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace herman
