#pragma once

// The Lyapunov densities f3, f5, f = f3 - alpha*f5 over the simplex, the
// Lyapunov functions V3, V5, V on gap vectors, and the derivative quantities
// (c, the second-order pair sum, P, Q, R) used by the critical-point analysis.
//
// Every polynomial is evaluated by enumerating its monomials directly, so the
// code can be read against the index conditions term by term. All numeric
// routines are templates over the scalar: Rational for exact work, double for
// optimisation, long double / int64 where tests or integer gaps need them.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "herman/errors.hpp"
#include "herman/rational.hpp"
#include "herman/ring.hpp"

#ifndef HERMAN_LAB_ALPHA
#define HERMAN_LAB_ALPHA 24
#endif

namespace herman {

/// The quintic weight in f = f3 - alpha*f5. Only mutation builds change it.
struct LyapunovConstants {
  static constexpr int alpha = HERMAN_LAB_ALPHA;
};
inline constexpr int kAlpha = LyapunovConstants::alpha;

/// Floating-point tolerance on the coordinate sum of a SimplexPoint.
inline constexpr double kSimplexTolerance = 1e-12;

/// Calls fn(indices) for every strictly increasing tuple lo <= i_0 < ... < i_{m-1} < hi
/// with i_j % 2 == parities[j]. `indices` is a span of length m.
template <class Fn>
void for_each_parity_tuple(int lo, int hi, std::span<const int> parities, Fn&& fn) {
  std::array<int, 16> idx{};
  const int m = static_cast<int>(parities.size());
  if (m == 0) {
    fn(std::span<const int>(idx.data(), 0));
    return;
  }
  int depth = 0;
  idx[0] = lo - 1;
  while (depth >= 0) {
    int next = idx[depth] + 1;
    while (next < hi && (next & 1) != parities[depth]) ++next;
    if (next >= hi || hi - next < m - depth) {
      --depth;
      continue;
    }
    idx[depth] = next;
    if (depth + 1 == m) {
      fn(std::span<const int>(idx.data(), m));
    } else {
      ++depth;
      idx[depth] = idx[depth - 1];
    }
  }
}

/// Calls fn(indices) for every 0 <= i_0 < ... < i_{m-1} < k whose consecutive
/// differences are all odd (the monomials of the degree-m alternating sum).
template <class Fn>
void for_each_alternating_tuple(int k, int m, Fn&& fn) {
  std::array<int, 16> pattern{};
  for (int start = 0; start < 2; ++start) {
    for (int j = 0; j < m; ++j) pattern[j] = (start + j) & 1;
    for_each_parity_tuple(0, k, std::span<const int>(pattern.data(), m), fn);
  }
}

namespace detail {

template <class T>
T product_at(std::span<const T> x, std::span<const int> idx, int shift = 0) {
  const int k = static_cast<int>(x.size());
  T acc = x[(idx[0] + shift) % k];
  for (std::size_t j = 1; j < idx.size(); ++j) acc *= x[(idx[j] + shift) % k];
  return acc;
}

template <class T>
T alternating_sum(std::span<const T> x, int degree) {
  T acc = T(0);
  for_each_alternating_tuple(static_cast<int>(x.size()), degree,
                             [&](std::span<const int> idx) { acc += product_at(x, idx); });
  return acc;
}

template <class T>
bool is_negative(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return sgn(v) < 0;
  } else {
    return v < T(0);
  }
}

}  // namespace detail

/// Polynomial forms on arbitrary K-vectors (no simplex check). Used on raw
/// integer gap vectors, on finite-difference probes that leave the simplex, and
/// as the kernels of the SimplexPoint API below.
template <class T>
T f3_poly(std::span<const T> x) {
  return detail::alternating_sum(x, 3);
}
template <class T>
T f5_poly(std::span<const T> x) {
  return detail::alternating_sum(x, 5);
}
template <class T>
T f_poly(std::span<const T> x) {
  return f3_poly(x) - T(kAlpha) * f5_poly(x);
}

/// K >= 3 odd nonnegative coordinates summing to 1 (exactly for Rational,
/// within kSimplexTolerance otherwise). Off-simplex input is rejected, never
/// renormalised.
template <class T>
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<T> coords) : coords_(std::move(coords)) {
    const auto k = coords_.size();
    if (k < 3 || k % 2 == 0) throw InvalidArgument("simplex dimension K must be odd and >= 3");
    T sum = T(0);
    for (const auto& c : coords_) {
      if (detail::is_negative(c)) throw InvalidArgument("simplex coordinates must be >= 0");
      sum += c;
    }
    if constexpr (std::is_same_v<T, Rational>) {
      if (sum != 1) throw InvalidArgument("simplex coordinates must sum to exactly 1");
    } else {
      if (!(std::abs(static_cast<long double>(sum) - 1.0L) <= kSimplexTolerance)) {
        throw InvalidArgument("simplex coordinates must sum to 1 within 1e-12");
      }
    }
  }

  static SimplexPoint uniform(int k) {
    if constexpr (std::is_same_v<T, Rational>) {
      return SimplexPoint(std::vector<T>(static_cast<std::size_t>(k), make_rational(1, k)));
    } else {
      return SimplexPoint(std::vector<T>(static_cast<std::size_t>(k), T(1) / T(k)));
    }
  }

  int dimension() const { return static_cast<int>(coords_.size()); }
  const T& operator[](std::size_t i) const { return coords_[i]; }
  std::span<const T> coords() const { return coords_; }

  /// (x_s, x_{s+1}, ..., x_{s-1}): the point seen from index s.
  SimplexPoint rotated(int s) const {
    const int k = dimension();
    std::vector<T> out(coords_.size());
    for (int i = 0; i < k; ++i) out[i] = coords_[((i + s) % k + k) % k];
    return SimplexPoint(std::move(out));
  }

 private:
  std::vector<T> coords_;
};

template <class T>
T f3(const SimplexPoint<T>& x) {
  return f3_poly(x.coords());
}
template <class T>
T f5(const SimplexPoint<T>& x) {
  return f5_poly(x.coords());
}
template <class T>
T f(const SimplexPoint<T>& x) {
  return f_poly(x.coords());
}

/// S_j(x) = sum_i x_i x_{i+j}, indices mod K. Only odd j occur in the analysis.
template <class T>
T scalar_rotation_product(const SimplexPoint<T>& x, int j) {
  const int k = x.dimension();
  if (j < 1 || j >= k) throw InvalidArgument("rotation offset j must satisfy 1 <= j < K");
  T acc = T(0);
  for (int i = 0; i < k; ++i) acc += x[i] * x[(i + j) % k];
  return acc;
}

/// First-order critical-point quantity with indices shifted by `shift`:
///   sum_{1<i2<K, i2 even} x_{i2} - alpha * sum_{1<i2<i3<i4<K, i2,i4 even, i3 odd} x_{i2} x_{i3} x_{i4}.
/// At an interior local maximum of f it takes the same value for every shift.
template <class T>
T c_value(const SimplexPoint<T>& x, int shift) {
  const int k = x.dimension();
  if (shift < 0 || shift >= k) throw InvalidArgument("rotation offset must be in [0, K)");
  static constexpr std::array<int, 1> kLinear{0};
  static constexpr std::array<int, 3> kCubic{0, 1, 0};
  T linear = T(0);
  T cubic = T(0);
  for_each_parity_tuple(2, k, kLinear, [&](std::span<const int> idx) {
    linear += detail::product_at(x.coords(), idx, shift);
  });
  for_each_parity_tuple(2, k, kCubic, [&](std::span<const int> idx) {
    cubic += detail::product_at(x.coords(), idx, shift);
  });
  return linear - T(kAlpha) * cubic;
}

/// sum_{3<=i3<i4<K, i3 odd, i4 even} x_{i3+shift} x_{i4+shift}; bounded by 1/alpha at
/// interior local maxima of f.
template <class T>
T second_order_sum(const SimplexPoint<T>& x, int shift) {
  const int k = x.dimension();
  if (shift < 0 || shift >= k) throw InvalidArgument("rotation offset must be in [0, K)");
  static constexpr std::array<int, 2> kPair{1, 0};
  T acc = T(0);
  for_each_parity_tuple(3, k, kPair, [&](std::span<const int> idx) {
    acc += detail::product_at(x.coords(), idx, shift);
  });
  return acc;
}

template <class T>
struct DerivativeTerms {
  T p;  ///< df/dx_0
  T q;  ///< first-order coefficient of f(x + eps*d), d = (-1, 0, 1, 0, ..., 0)
  T r;  ///< second-order coefficient of f(x + eps*d)
};

/// P = sum_{0<i1<i2<K, i1 odd, i2 even} x_{i1} x_{i2}
///     - alpha * sum_{0<i1<..<i4<K, i1,i3 odd, i2,i4 even} x_{i1} x_{i2} x_{i3} x_{i4}
/// on an arbitrary vector (no simplex check).
template <class T>
T partial_x0(std::span<const T> x) {
  const int k = static_cast<int>(x.size());
  static constexpr std::array<int, 2> kQuadratic{1, 0};
  static constexpr std::array<int, 4> kQuartic{1, 0, 1, 0};
  T quadratic = T(0);
  T quartic = T(0);
  for_each_parity_tuple(1, k, kQuadratic,
                        [&](std::span<const int> idx) { quadratic += detail::product_at(x, idx); });
  for_each_parity_tuple(1, k, kQuartic,
                        [&](std::span<const int> idx) { quartic += detail::product_at(x, idx); });
  return quadratic - T(kAlpha) * quartic;
}

/// Full gradient of f on an arbitrary vector: df/dx_j(x) = P(x_j, x_{j+1}, ...),
/// by rotation symmetry of f.
template <class T>
std::vector<T> gradient_f(std::span<const T> x) {
  const int k = static_cast<int>(x.size());
  std::vector<T> grad(x.size());
  std::vector<T> view(x.size());
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) view[i] = x[(i + j) % k];
    grad[j] = partial_x0(std::span<const T>(view));
  }
  return grad;
}

template <class T>
DerivativeTerms<T> derivative_terms(const SimplexPoint<T>& x) {
  const int k = x.dimension();
  if (k < 5) throw InvalidArgument("derivative terms need K >= 5");
  const T p = partial_x0(x.coords());
  const T p_shifted = partial_x0(x.rotated(2).coords());
  static constexpr std::array<int, 2> kPair{1, 0};
  T pairs = T(0);
  for_each_parity_tuple(3, k, kPair,
                        [&](std::span<const int> idx) { pairs += detail::product_at(x.coords(), idx); });
  const T r = -x[1] + T(kAlpha) * x[1] * pairs;
  return {p, p_shifted - p, r};
}

/// 4N^2 f3(g/N), 4N^2 f5(g/N) and 4N^2 f(g/N), exactly. K must be odd; K = 1
/// gives 0 (no monomials).
Rational V3(const GapVector& g);
Rational V5(const GapVector& g);
Rational V(const GapVector& g);

/// f3 / f5 evaluated on the raw integer gaps.
std::int64_t f3_of_gaps(std::span<const int> gaps);
std::int64_t f5_of_gaps(std::span<const int> gaps);

/// Exact simplex point g/N.
SimplexPoint<Rational> normalized_gaps(const GapVector& g);

}  // namespace herman
