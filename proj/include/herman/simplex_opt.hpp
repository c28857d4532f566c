#pragma once

// Projected-gradient maximisation of f3 / f5 / f over the simplex, and the
// first- and second-order conditions an interior local maximum of f must meet.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herman/lyapunov.hpp"
#include "herman/rational.hpp"

namespace herman {

enum class Target { f3, f5, f };

/// "f3" / "f5" / "f"; throws InvalidArgument otherwise.
Target parse_target(std::string_view name);
std::string to_string(Target target);

enum class StepRule { fixed, backtracking };

struct OptimizerConfig {
  int starts = 50;
  int max_iters = 20000;
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 0.05;
  double tol_grad = 1e-11;      ///< on ||proj(x + grad) - x||_inf
  double tol_interior = 1e-7;   ///< min coordinate of an interior point
  std::uint64_t seed = 1;
};

void validate(const OptimizerConfig& cfg);

struct CriticalPointReport {
  std::vector<double> point;
  double value = 0.0;
  bool converged = false;
  bool interior = false;
  int iterations = 0;
  double stationarity = 0.0;
  std::vector<double> c_values;      ///< c at every rotation
  std::vector<double> second_order;  ///< pair sum at every rotation
  double weighted_s_lhs = 0.0;            ///< sum_{odd i<K-2} (K-i-2)/2 S_i
  double drop_terms_margin = 0.0;       ///< min over rotations and odd i1 of (full - dropped)
  std::optional<bool> f5_bound_check; ///< alpha f5 < 1/216, only when f > 1/27
};

/// Fills the critical-point quantities of f at `point` (K >= 3 odd).
CriticalPointReport kkt_report(const SimplexPoint<double>& point, double tol_interior = 1e-7);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

double target_value(Target target, std::span<const double> x);
std::vector<double> target_gradient(Target target, std::span<const double> x);

/// One ascent run from `start`.
CriticalPointReport ascend(Target target, std::vector<double> start, const OptimizerConfig& cfg);

/// Dirichlet(1, ..., 1) sample from the stream.
std::vector<double> random_simplex_point(int k, RandomStream& rng);

/// The uniform point followed by the K rotations of (1/3, 0, ..., 0, 1/3, 1/3).
std::vector<std::vector<double>> structured_starts(int k);

/// All runs, sorted by value (descending) then point (lexicographic). Random
/// start i uses derive_stream(cfg.seed, i).
std::vector<CriticalPointReport> run_starts_serial(Target target, int k, const OptimizerConfig& cfg,
                                                   bool include_structured);
std::vector<CriticalPointReport> run_starts_parallel(Target target, int k,
                                                     const OptimizerConfig& cfg,
                                                     bool include_structured);

/// Best of cfg.starts random starts plus the structured starts.
CriticalPointReport maximize(Target target, int k, const OptimizerConfig& cfg);

struct ConditionalChecks {
  bool c_constant = false;    ///< spread of c_values <= 10 tol
  bool second_order = false;  ///< every pair sum <= 1/alpha + 10 tol
  bool weighted_s = false;         ///< weighted_s_lhs <= K/alpha + 10 tol
  bool drop_terms = false;       ///< drop_terms_margin >= -10 tol
  bool all() const { return c_constant && second_order && weighted_s && drop_terms; }
};

ConditionalChecks conditional_checks(const CriticalPointReport& report, double tol);

struct ScanResult {
  int k = 0;
  int starts = 0;
  double best_value = 0.0;
  std::optional<double> interior_best_value;
  std::vector<CriticalPointReport> interior_points;
  int violations = 0;              ///< interior points with f > 1/27 + 1e-9
  int conditional_violations = 0;  ///< interior points failing ConditionalChecks
  bool pass() const { return violations == 0 && conditional_violations == 0; }
};

/// Random starts only; keeps converged interior critical points.
ScanResult interior_max_scan(int k, const OptimizerConfig& cfg);

/// alpha <= (K-1) / ((3K-9) f - (K-1) alpha f5): the bound on alpha implied by the
/// critical-point chain. nullopt when the denominator is not positive.
template <class T>
std::optional<T> implied_alpha_bound(int k, const T& f_value, const T& alpha_f5) {
  const T denom = T(3 * k - 9) * f_value - T(k - 1) * alpha_f5;
  if (!(denom > T(0))) return std::nullopt;
  return T(k - 1) / denom;
}

/// The chain fed with the extremal values f = 1/27, alpha f5 = 1/216, which gives
/// 216 (K-1) / (23K - 71).
Rational synthetic_alpha_threshold(int k);

struct ChainReport {
  bool applicable = false;
  std::string reason;  ///< why not applicable
  double c = 0.0;
  double c_sum_residual = 0.0;      ///< K c - ((K-1)/2 - (K-3)/2 alpha f3)
  double weighted_c_lhs = 0.0;          ///< c * sum w_i S_i
  double weighted_c_rhs = 0.0;          ///< (K-3) f - (K-2) alpha f5
  double weighted_s_lhs = 0.0;
  double weighted_s_rhs = 0.0;         ///< K / alpha
  double alpha_f5 = 0.0;
  std::optional<double> implied_alpha;
  bool contradiction = false;     ///< implied bound is below the actual alpha
};

ChainReport contradiction_chain_check(const SimplexPoint<double>& point, double tol_grad = 1e-11,
                                      double tol_interior = 1e-7);

struct GradientValidation {
  double max_rel_err = 0.0;
  double max_rel_err_p = 0.0;
  double max_rel_err_q = 0.0;
  double max_rel_err_r = 0.0;
};

/// P/Q/R against central differences of f (long double, step 1e-5) at random
/// interior points.
GradientValidation gradient_fd_validation(int k, int samples, std::uint64_t seed);

}  // namespace herman
