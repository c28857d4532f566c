#include "herman/simplex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "herman/errors.hpp"
#include "herman/random_stream.hpp"

namespace herman {

namespace {

constexpr double kOneOver27 = 1.0 / 27.0;

void require_odd_k(int k) {
  if (k < 3 || k % 2 == 0) throw InvalidArgument("K must be odd and >= 3");
  if (k > 15) throw InvalidArgument("K must be <= 15");
}

// d/dx_j of the degree-m alternating sum, by differentiating each monomial.
std::vector<double> alternating_gradient(std::span<const double> x, int degree) {
  std::vector<double> grad(x.size(), 0.0);
  for_each_alternating_tuple(static_cast<int>(x.size()), degree, [&](std::span<const int> idx) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      double prod = 1.0;
      for (std::size_t m = 0; m < idx.size(); ++m) {
        if (m != j) prod *= x[idx[m]];
      }
      grad[idx[j]] += prod;
    }
  });
  return grad;
}

double inf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double stationarity_of(Target target, std::span<const double> x) {
  const auto g = target_gradient(target, x);
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += g[i];
  const auto p = project_to_simplex(y);
  return inf_distance(p, x);
}

bool report_less(const CriticalPointReport& a, const CriticalPointReport& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.point < b.point;
}

// Sum of the point after projection can drift by an ulp or two; SimplexPoint
// tolerates 1e-12 so it is only renormalised when the drift is visible.
SimplexPoint<double> as_point(const std::vector<double>& x) {
  double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (std::abs(sum - 1.0) <= kSimplexTolerance) return SimplexPoint<double>(x);
  std::vector<double> y = x;
  for (auto& v : y) v /= sum;
  return SimplexPoint<double>(std::move(y));
}

}  // namespace

Target parse_target(std::string_view name) {
  if (name == "f3") return Target::f3;
  if (name == "f5") return Target::f5;
  if (name == "f") return Target::f;
  throw InvalidArgument("target must be one of f3, f5, f");
}

std::string to_string(Target target) {
  switch (target) {
    case Target::f3: return "f3";
    case Target::f5: return "f5";
    case Target::f: return "f";
  }
  return "?";
}

void validate(const OptimizerConfig& cfg) {
  if (cfg.starts < 0) throw InvalidArgument("starts must be >= 0");
  if (cfg.max_iters <= 0) throw InvalidArgument("max_iters must be positive");
  if (!(cfg.tol_grad > 0.0)) throw InvalidArgument("tol_grad must be positive");
  if (!(cfg.tol_interior > 0.0)) throw InvalidArgument("tol_interior must be positive");
  if (cfg.step_rule == StepRule::fixed && !(cfg.fixed_step > 0.0)) {
    throw InvalidArgument("fixed_step must be positive");
  }
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("cannot project an empty vector");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

double target_value(Target target, std::span<const double> x) {
  switch (target) {
    case Target::f3: return f3_poly(x);
    case Target::f5: return f5_poly(x);
    case Target::f: return f_poly(x);
  }
  return 0.0;
}

std::vector<double> target_gradient(Target target, std::span<const double> x) {
  switch (target) {
    case Target::f3: return alternating_gradient(x, 3);
    case Target::f5: return alternating_gradient(x, 5);
    case Target::f: return gradient_f(x);
  }
  return {};
}

CriticalPointReport kkt_report(const SimplexPoint<double>& point, double tol_interior) {
  const int k = point.dimension();
  CriticalPointReport r;
  r.point.assign(point.coords().begin(), point.coords().end());
  r.value = f(point);
  r.interior = *std::min_element(r.point.begin(), r.point.end()) >= tol_interior;
  r.stationarity = stationarity_of(Target::f, r.point);
  r.converged = true;
  for (int s = 0; s < k; ++s) {
    r.c_values.push_back(c_value(point, s));
    r.second_order.push_back(second_order_sum(point, s));
  }
  for (int i = 1; i < k - 2; i += 2) {
    r.weighted_s_lhs += 0.5 * (k - i - 2) * scalar_rotation_product(point, i);
  }

  static constexpr std::array<int, 1> kLinear{0};
  static constexpr std::array<int, 3> kCubic{0, 1, 0};
  double margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < k; ++s) {
    const auto y = point.rotated(s);
    const double full = c_value(y, 0);
    for (int i1 = 1; i1 < k; i1 += 2) {
      double linear = 0.0;
      double cubic = 0.0;
      for_each_parity_tuple(i1 + 1, k, kLinear,
                            [&](std::span<const int> idx) { linear += y[idx[0]]; });
      for_each_parity_tuple(i1 + 1, k, kCubic, [&](std::span<const int> idx) {
        cubic += y[idx[0]] * y[idx[1]] * y[idx[2]];
      });
      const double dropped = linear - kAlpha * cubic;
      margin = std::min(margin, y[0] * y[i1] * (full - dropped));
    }
  }
  r.drop_terms_margin = margin;

  if (r.value > kOneOver27) r.f5_bound_check = kAlpha * f5(point) < 1.0 / 216.0;
  return r;
}

CriticalPointReport ascend(Target target, std::vector<double> start, const OptimizerConfig& cfg) {
  validate(cfg);
  std::vector<double> x = project_to_simplex(start);
  const std::size_t k = x.size();
  double value = target_value(target, x);
  double step = 1.0;
  int it = 0;
  bool converged = false;
  double stationarity = 0.0;
  std::vector<double> trial(k);
  for (; it < cfg.max_iters; ++it) {
    const auto g = target_gradient(target, x);
    for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] + g[i];
    stationarity = inf_distance(project_to_simplex(trial), x);
    if (stationarity <= cfg.tol_grad) {
      converged = true;
      break;
    }
    std::vector<double> next;
    double next_value = 0.0;
    if (cfg.step_rule == StepRule::fixed) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] + cfg.fixed_step * g[i];
      next = project_to_simplex(trial);
      next_value = target_value(target, next);
    } else {
      // Armijo backtracking along the projection arc.
      step = std::min(step * 2.0, 1e6);
      bool accepted = false;
      while (step > 1e-20) {
        for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] + step * g[i];
        next = project_to_simplex(trial);
        next_value = target_value(target, next);
        double predicted = 0.0;
        for (std::size_t i = 0; i < k; ++i) predicted += g[i] * (next[i] - x[i]);
        if (next_value >= value + 1e-4 * predicted) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // stalled at rounding level
    }
    x = std::move(next);
    value = next_value;
  }

  if (target == Target::f) {
    auto r = kkt_report(as_point(x), cfg.tol_interior);
    r.converged = converged;
    r.interior = r.interior && converged;
    r.iterations = it;
    r.stationarity = stationarity;
    return r;
  }
  CriticalPointReport r;
  r.point = x;
  r.value = value;
  r.converged = converged;
  r.interior = converged && *std::min_element(x.begin(), x.end()) >= cfg.tol_interior;
  r.iterations = it;
  r.stationarity = stationarity;
  return r;
}

std::vector<double> random_simplex_point(int k, RandomStream& rng) {
  std::vector<double> x(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (auto& v : x) {
    v = -std::log1p(-rng.uniform());
    if (v <= 0.0) v = std::numeric_limits<double>::min();
    sum += v;
  }
  for (auto& v : x) v /= sum;
  return x;
}

std::vector<std::vector<double>> structured_starts(int k) {
  require_odd_k(k);
  std::vector<std::vector<double>> out;
  out.emplace_back(static_cast<std::size_t>(k), 1.0 / k);
  for (int r = 0; r < k; ++r) {
    std::vector<double> x(static_cast<std::size_t>(k), 0.0);
    x[r] = 1.0 / 3.0;
    x[(r + k - 2) % k] = 1.0 / 3.0;
    x[(r + k - 1) % k] = 1.0 / 3.0;
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

std::vector<std::vector<double>> all_starts(int k, const OptimizerConfig& cfg,
                                            bool include_structured) {
  require_odd_k(k);
  validate(cfg);
  std::vector<std::vector<double>> starts;
  if (include_structured) starts = structured_starts(k);
  for (int i = 0; i < cfg.starts; ++i) {
    auto rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(i));
    starts.push_back(random_simplex_point(k, rng));
  }
  return starts;
}

}  // namespace

std::vector<CriticalPointReport> run_starts_serial(Target target, int k, const OptimizerConfig& cfg,
                                                   bool include_structured) {
  const auto starts = all_starts(k, cfg, include_structured);
  std::vector<CriticalPointReport> out;
  out.reserve(starts.size());
  for (const auto& s : starts) out.push_back(ascend(target, s, cfg));
  std::sort(out.begin(), out.end(), report_less);
  return out;
}

std::vector<CriticalPointReport> run_starts_parallel(Target target, int k,
                                                     const OptimizerConfig& cfg,
                                                     bool include_structured) {
  const auto starts = all_starts(k, cfg, include_structured);
  std::vector<CriticalPointReport> out(starts.size());
  const auto n = static_cast<std::int64_t>(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) out[i] = ascend(target, starts[i], cfg);
  std::sort(out.begin(), out.end(), report_less);
  return out;
}

CriticalPointReport maximize(Target target, int k, const OptimizerConfig& cfg) {
  auto runs = run_starts_parallel(target, k, cfg, true);
  return runs.front();
}

ConditionalChecks conditional_checks(const CriticalPointReport& report, double tol) {
  ConditionalChecks c;
  const double slack = 10.0 * tol;
  const int k = static_cast<int>(report.point.size());
  if (!report.c_values.empty()) {
    const auto [lo, hi] = std::minmax_element(report.c_values.begin(), report.c_values.end());
    c.c_constant = *hi - *lo <= slack;
  }
  c.second_order = std::all_of(report.second_order.begin(), report.second_order.end(),
                               [&](double v) { return v <= 1.0 / kAlpha + slack; });
  c.weighted_s = report.weighted_s_lhs <= static_cast<double>(k) / kAlpha + slack;
  c.drop_terms = report.drop_terms_margin >= -slack;
  return c;
}

ScanResult interior_max_scan(int k, const OptimizerConfig& cfg) {
  ScanResult result;
  result.k = k;
  result.starts = cfg.starts;
  const auto runs = run_starts_parallel(Target::f, k, cfg, false);
  if (!runs.empty()) result.best_value = runs.front().value;
  for (const auto& r : runs) {
    if (!(r.converged && r.interior)) continue;
    if (!result.interior_best_value || r.value > *result.interior_best_value) {
      result.interior_best_value = r.value;
    }
    if (r.value > kOneOver27 + 1e-9) ++result.violations;
    if (!conditional_checks(r, cfg.tol_grad).all()) ++result.conditional_violations;
    result.interior_points.push_back(r);
  }
  return result;
}

Rational synthetic_alpha_threshold(int k) {
  require_odd_k(k);
  const auto bound = implied_alpha_bound<Rational>(k, make_rational(1, 27), make_rational(1, 216));
  if (!bound) throw InvalidArgument("chain gives no bound for this K");
  return *bound;
}

ChainReport contradiction_chain_check(const SimplexPoint<double>& point, double tol_grad,
                                      double tol_interior) {
  const int k = point.dimension();
  ChainReport out;
  const auto report = kkt_report(point, tol_interior);
  const auto checks = conditional_checks(report, tol_grad);
  out.c = report.c_values.front();
  const double f3v = f3(point);
  const double fv = report.value;
  out.alpha_f5 = kAlpha * f5(point);
  out.c_sum_residual = k * out.c - (0.5 * (k - 1) - 0.5 * (k - 3) * kAlpha * f3v);
  out.weighted_s_lhs = report.weighted_s_lhs;
  out.weighted_s_rhs = static_cast<double>(k) / kAlpha;
  out.weighted_c_lhs = out.c * report.weighted_s_lhs;
  out.weighted_c_rhs = (k - 3) * fv - (k - 2) * out.alpha_f5;
  out.implied_alpha = implied_alpha_bound<double>(k, fv, out.alpha_f5);

  if (k < 5) {
    out.reason = "K < 5";
  } else if (!report.interior) {
    out.reason = "not interior";
  } else if (!checks.c_constant) {
    out.reason = "first-order condition fails";
  } else if (!checks.second_order) {
    out.reason = "second-order condition fails";
  } else if (!(fv > kOneOver27)) {
    out.reason = "f <= 1/27";
  } else {
    out.applicable = true;
  }
  out.contradiction = out.applicable && out.implied_alpha && *out.implied_alpha < kAlpha;
  return out;
}

GradientValidation gradient_fd_validation(int k, int samples, std::uint64_t seed) {
  require_odd_k(k);
  if (k < 5) throw InvalidArgument("gradient validation needs K >= 5");
  if (samples <= 0) throw InvalidArgument("samples must be positive");
  constexpr long double h = 1e-5L;
  auto rel = [](double analytic, long double fd) {
    const long double denom = std::max(std::abs(fd), 1e-12L);
    return static_cast<double>(std::abs(static_cast<long double>(analytic) - fd) / denom);
  };
  GradientValidation out;
  for (int s = 0; s < samples; ++s) {
    auto rng = derive_stream(seed, static_cast<std::uint64_t>(s));
    const SimplexPoint<double> x = as_point(random_simplex_point(k, rng));
    const auto terms = derivative_terms(x);

    std::vector<long double> base(x.coords().begin(), x.coords().end());
    auto eval = [&](long double eps, int direction) {
      std::vector<long double> y = base;
      if (direction == 0) {
        y[0] += eps;
      } else {
        y[0] -= eps;
        y[2] += eps;
      }
      return f_poly(std::span<const long double>(y));
    };
    const long double f0 = f_poly(std::span<const long double>(base));
    const long double p_fd = (eval(h, 0) - eval(-h, 0)) / (2 * h);
    const long double plus = eval(h, 1);
    const long double minus = eval(-h, 1);
    const long double q_fd = (plus - minus) / (2 * h);
    const long double r_fd = (plus - 2 * f0 + minus) / (2 * h * h);

    out.max_rel_err_p = std::max(out.max_rel_err_p, rel(terms.p, p_fd));
    out.max_rel_err_q = std::max(out.max_rel_err_q, rel(terms.q, q_fd));
    out.max_rel_err_r = std::max(out.max_rel_err_r, rel(terms.r, r_fd));
  }
  out.max_rel_err = std::max({out.max_rel_err_p, out.max_rel_err_q, out.max_rel_err_r});
  return out;
}

}  // namespace herman
