#include "herman/lyapunov.hpp"

namespace herman {

namespace {

std::vector<std::int64_t> widen(std::span<const int> gaps) {
  return {gaps.begin(), gaps.end()};
}

void require_odd(const GapVector& g) {
  if (g.token_count() % 2 == 0) {
    throw InvalidArgument("Lyapunov functions are defined for an odd number of tokens");
  }
}

Rational scaled(std::int64_t value, std::int64_t numerator, std::int64_t denominator) {
  Rational out(mpz_class(static_cast<long>(value)) * static_cast<long>(numerator),
               mpz_class(static_cast<long>(denominator)));
  out.canonicalize();
  return out;
}

}  // namespace

std::int64_t f3_of_gaps(std::span<const int> gaps) {
  const auto wide = widen(gaps);
  return f3_poly(std::span<const std::int64_t>(wide));
}

std::int64_t f5_of_gaps(std::span<const int> gaps) {
  const auto wide = widen(gaps);
  return f5_poly(std::span<const std::int64_t>(wide));
}

// 4N^2 f3(g/N) = 4 f3(g) / N since f3 is homogeneous of degree 3; likewise
// 4N^2 f5(g/N) = 4 f5(g) / N^3.
Rational V3(const GapVector& g) {
  require_odd(g);
  const std::int64_t n = g.ring_size();
  return scaled(f3_of_gaps(g.gaps()), 4, n);
}

Rational V5(const GapVector& g) {
  require_odd(g);
  const std::int64_t n = g.ring_size();
  return scaled(f5_of_gaps(g.gaps()), 4, n * n * n);
}

Rational V(const GapVector& g) { return V3(g) - Rational(kAlpha) * V5(g); }

SimplexPoint<Rational> normalized_gaps(const GapVector& g) {
  std::vector<Rational> coords;
  coords.reserve(g.gaps().size());
  for (int gap : g.gaps()) coords.push_back(make_rational(gap, g.ring_size()));
  return SimplexPoint<Rational>(std::move(coords));
}

}  // namespace herman
