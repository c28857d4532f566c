// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "herman/lyapunov.hpp"
#include "herman/markov.hpp"
#include "herman/montecarlo.hpp"
#include "herman/polynomial.hpp"
#include "herman/simplex_opt.hpp"

using namespace herman;

namespace {

constexpr double kOptTol = 1e-9;        // optimizer values against closed forms
constexpr double kThresholdTol = 1e-12;  // synthetic alpha thresholds
constexpr double kFdTol = 1e-6;          // P/Q/R relative error
constexpr double kZMax = 4.0;            // Monte Carlo |mean - exact| / stderr
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome exact_k3_formula() {
  RandomStream rng(kSeed);
  const SolverCapacity cap{30, 30};
  int bad = 0;
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + static_cast<int>(rng.below(28));
    const auto g = random_gap_vector(n, 3, rng);
    if (expected_time_exact(g, cap) != make_rational(4 * g[0] * g[1] * g[2], n)) ++bad;
  }
  return {bad == 0, "50 states, N <= 30, mismatches " + std::to_string(bad)};
}

Outcome equidistant_values() {
  const auto a = expected_time_exact(GapVector(9, {3, 3, 3}));
  const auto b = expected_time_exact(GapVector(12, {4, 4, 4}));
  const bool ok = a == 12 && a == make_rational(4 * 81, 27) && b == make_rational(64, 3);
  return {ok, "N=9 " + a.get_str() + ", N=12 " + b.get_str()};
}

Outcome bound_sweep() {
  Outcome o;
  std::ostringstream d;
  for (int n = 3; n <= 12; ++n) {
    const auto s = sweep_exact(n);
    int at_bound = 0;
    bool equidistant_at_bound = false;
    for (const auto& row : s.rows) {
      if (row.expected_time > s.bound) o.pass = false;
      if (row.expected_time == s.bound) {
        ++at_bound;
        equidistant_at_bound = row.gaps.token_count() == 3 && row.gaps[0] == n / 3 &&
                               row.gaps[1] == n / 3 && row.gaps[2] == n / 3;
      }
    }
    const bool want_equality = n % 3 == 0;
    if (want_equality ? !(at_bound == 1 && equidistant_at_bound) : at_bound != 0) o.pass = false;
    if (!s.pass) o.pass = false;
    d << n << ':' << s.max.value.get_str() << (n < 12 ? " " : "");
  }
  o.detail = "max E T by N " + d.str();
  return o;
}

Outcome drift_suite() {
  RandomStream rng(kSeed + 1);
  std::vector<GapVector> states;
  for (int k = 3; k <= 9; k += 2) {
    for (int t = 0; t < 200; ++t) {
      const int n = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(31 - k)));
      states.push_back(random_gap_vector(n, k, rng));
    }
  }
  const auto records = drift_records_parallel(states);
  int bad = 0;
  for (const auto& r : records) {
    if (!r.pass()) ++bad;
  }
  return {bad == 0, std::to_string(records.size()) + " states, failures " + std::to_string(bad)};
}

Outcome moment_table() {
  Outcome o;
  std::size_t blocks = 0, pairs = 0;
  for (int k = 3; k <= 11; k += 2) {
    const auto t = verify_moment_table(k);
    blocks += t.single_blocks;
    pairs += t.block_pairs;
    if (!t.mismatches.empty()) o.pass = false;
  }
  o.detail = std::to_string(blocks) + " blocks, " + std::to_string(pairs) + " block pairs";
  return o;
}

Outcome symbolic_identities() {
  int checks = 0, bad = 0;
  auto count = [&](bool ok) {
    ++checks;
    if (!ok) ++bad;
  };
  for (int k = 5; k <= 13; k += 2) {
    count(check_continuity(k).pass);
    count(check_rotation_sum_identity(k).pass);
    count(check_fancy_sum(k, 3).pass);
    count(check_fancy_sum(k, 5).pass);
    count(check_corollary_sums(k).pass);
    count(check_c_rotation_sum(k).report.pass);
  }
  return {bad == 0, std::to_string(checks) + " identities, failures " + std::to_string(bad)};
}

Outcome optimizer_closed_forms() {
  Outcome o;
  OptimizerConfig cfg;
  cfg.seed = kSeed;
  double worst3 = 0, worst = 0;
  for (int k = 3; k <= 11; k += 2) {
    const double e3 = std::abs(maximize(Target::f3, k, cfg).value - (1.0 - 1.0 / (k * k)) / 24.0);
    const double ef = std::abs(maximize(Target::f, k, cfg).value - 1.0 / 27.0);
    worst3 = std::max(worst3, e3);
    worst = std::max(worst, ef);
    std::vector<Rational> x(static_cast<std::size_t>(k), Rational(0));
    x[0] = x[k - 2] = x[k - 1] = make_rational(1, 3);
    if (f(SimplexPoint<Rational>(x)) != make_rational(1, 27)) o.pass = false;
  }
  if (!(worst3 <= kOptTol && worst <= kOptTol)) o.pass = false;
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |f3 err| %.2e, max |f - 1/27| %.2e", worst3, worst);
  o.detail = buf;
  return o;
}

Outcome interior_scan() {
  Outcome o;
  OptimizerConfig cfg;
  cfg.starts = 200;
  cfg.seed = kSeed;
  std::ostringstream d;
  for (int k = 5; k <= 9; k += 2) {
    const auto s = interior_max_scan(k, cfg);
    if (!s.pass()) o.pass = false;
    d << "K=" << k << " interior " << s.interior_points.size() << " violations " << s.violations << "; ";
  }
  const double t5 = synthetic_alpha_threshold(5).get_d();
  const double t7 = synthetic_alpha_threshold(7).get_d();
  if (!(std::abs(t5 - 216.0 / 11.0) <= kThresholdTol && std::abs(t7 - 14.4) <= kThresholdTol)) {
    o.pass = false;
  }
  d << "thresholds " << synthetic_alpha_threshold(5).get_str() << ", "
    << synthetic_alpha_threshold(7).get_str();
  o.detail = d.str();
  return o;
}

Outcome derivative_validation() {
  double worst = 0;
  for (int k = 5; k <= 9; k += 2) {
    worst = std::max(worst, gradient_fd_validation(k, 100, kSeed).max_rel_err);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max relative error %.2e", worst);
  return {worst <= kFdTol, buf};
}

Outcome coupling() {
  Outcome o;
  o.pass = coupled_equivalence_exhaustive_n3().pass;
  std::int64_t steps = 0;
  for (int n = 3; n <= 15; n += 2) {
    const auto r = coupled_equivalence(n, 10000, kSeed);
    steps += r.steps_checked;
    if (!r.pass) o.pass = false;
  }
  o.detail = "odd N 3..15, 10^4 runs each, " + std::to_string(steps) + " steps compared";
  return o;
}

Outcome monte_carlo() {
  const std::vector<GapVector> states{
      GapVector(9, {3, 3, 3}),       GapVector(3, {1, 1, 1}),    GapVector(5, {1, 1, 3}),
      GapVector(5, {1, 1, 1, 1, 1}), GapVector(7, {1, 2, 4}),    GapVector(7, {1, 1, 1, 1, 3}),
      GapVector(9, {1, 2, 1, 2, 3}), GapVector(10, {2, 3, 5}),   GapVector(11, {1, 2, 3, 2, 3}),
      GapVector(12, {4, 4, 4})};
  Outcome o;
  double worst_z = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto z = config_from_gaps(states[i]);
    const auto stats = estimate(z, 100000, kSeed + i);
    const double exact = expected_time_exact(states[i]).get_d();
    const double score = std::abs(stats.mean - exact) / stats.stderr_;
    worst_z = std::max(worst_z, score);
    if (!(score <= kZMax)) o.pass = false;
  }
  // Same seed, same numbers.
  const auto z0 = config_from_gaps(states[0]);
  if (!(estimate(z0, 100000, kSeed) == estimate(z0, 100000, kSeed))) o.pass = false;
  char buf[96];
  std::snprintf(buf, sizeof buf, "10 states, 10^5 runs each, max z %.2f", worst_z);
  o.detail = buf;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact_k3_formula", exact_k3_formula},
      {"equidistant_values", equidistant_values},
      {"bound_sweep_n3_to_12", bound_sweep},
      {"drift_suite", drift_suite},
      {"moment_table", moment_table},
      {"symbolic_identities", symbolic_identities},
      {"optimizer_closed_forms", optimizer_closed_forms},
      {"interior_scan_and_thresholds", interior_scan},
      {"derivative_validation", derivative_validation},
      {"coupling", coupling},
      {"monte_carlo_consistency", monte_carlo},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %s (%s; %.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
