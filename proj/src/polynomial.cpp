#include "herman/polynomial.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "herman/errors.hpp"
#include "herman/lyapunov.hpp"

namespace herman {

namespace {

void require_odd_k(int k, int minimum) {
  if (k < minimum || k % 2 == 0) {
    throw InvalidArgument("K must be odd and >= " + std::to_string(minimum));
  }
}

/// Adds coeff * prod x_{idx} (indices given relative to 0).
void add_product(SparsePolynomial& p, std::span<const int> idx, const Rational& coeff) {
  p.add_term(Monomial(idx.begin(), idx.end()), coeff);
}

std::vector<std::string> render(const SparsePolynomial& p, bool positive) {
  std::vector<std::string> out;
  for (const auto& [m, c] : p.terms()) {
    if ((sgn(c) > 0) == positive) out.push_back(monomial_to_string(m, positive ? c : Rational(-c)));
  }
  return out;
}

}  // namespace

SparsePolynomial SparsePolynomial::variable(int num_vars, int index) {
  SparsePolynomial p(num_vars);
  p.add_term({index}, 1);
  return p;
}

SparsePolynomial SparsePolynomial::constant(int num_vars, const Rational& value) {
  SparsePolynomial p(num_vars);
  p.add_term({}, value);
  return p;
}

void SparsePolynomial::add_term(Monomial monomial, const Rational& coeff) {
  if (sgn(coeff) == 0) return;
  for (int v : monomial) {
    if (v < 0 || v >= num_vars_) throw InvalidArgument("variable index out of range");
  }
  std::sort(monomial.begin(), monomial.end());
  auto [it, inserted] = terms_.try_emplace(std::move(monomial), coeff);
  if (!inserted) {
    it->second += coeff;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

SparsePolynomial& SparsePolynomial::operator+=(const SparsePolynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

SparsePolynomial& SparsePolynomial::operator-=(const SparsePolynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

SparsePolynomial& SparsePolynomial::operator*=(const Rational& scalar) {
  if (sgn(scalar) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= scalar;
  return *this;
}

SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
  SparsePolynomial out(std::max(a.num_vars_, b.num_vars_));
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      m.reserve(ma.size() + mb.size());
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
      out.add_term(std::move(m), ca * cb);
    }
  }
  return out;
}

SparsePolynomial SparsePolynomial::substitute(int var, const SparsePolynomial& replacement) const {
  SparsePolynomial out(num_vars_);
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    int power = 0;
    for (int v : m) {
      if (v == var) {
        ++power;
      } else {
        rest.push_back(v);
      }
    }
    SparsePolynomial piece(num_vars_);
    piece.add_term(rest, c);
    for (int i = 0; i < power; ++i) piece = piece * replacement;
    out += piece;
  }
  return out;
}

SparsePolynomial SparsePolynomial::rename(const std::vector<int>& mapping, int new_num_vars) const {
  SparsePolynomial out(new_num_vars);
  for (const auto& [m, c] : terms_) {
    Monomial renamed;
    renamed.reserve(m.size());
    for (int v : m) renamed.push_back(mapping.at(static_cast<std::size_t>(v)));
    out.add_term(std::move(renamed), c);
  }
  return out;
}

bool SparsePolynomial::mentions(int var) const {
  return std::any_of(terms_.begin(), terms_.end(), [var](const auto& term) {
    return std::binary_search(term.first.begin(), term.first.end(), var);
  });
}

std::string monomial_to_string(const Monomial& m, const Rational& coeff) {
  std::ostringstream os;
  const bool bare = coeff == 1 && !m.empty();
  if (!bare) os << coeff.get_str();
  std::size_t i = 0;
  while (i < m.size()) {
    std::size_t j = i;
    while (j < m.size() && m[j] == m[i]) ++j;
    if (!(bare && i == 0)) os << '*';
    os << 'x' << m[i];
    if (j - i > 1) os << '^' << (j - i);
    i = j;
  }
  return os.str();
}

std::string SparsePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += monomial_to_string(m, c);
  }
  return out;
}

SparsePolynomial build_alternating(int k, int degree) {
  SparsePolynomial p(k);
  for_each_alternating_tuple(k, degree, [&](std::span<const int> idx) { add_product(p, idx, 1); });
  return p;
}

SparsePolynomial build_f3(int k) {
  require_odd_k(k, 3);
  return build_alternating(k, 3);
}

SparsePolynomial build_f5(int k) {
  require_odd_k(k, 3);
  return build_alternating(k, 5);
}

SparsePolynomial build_f(int k) { return build_f3(k) - Rational(kAlpha) * build_f5(k); }

SparsePolynomial rotate(const SparsePolynomial& p, int k) {
  const int n = p.num_vars();
  if (k < 0 || k >= std::max(n, 1)) throw InvalidArgument("rotation must satisfy 0 <= k < K");
  std::vector<int> mapping(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mapping[i] = (i + k) % n;
  return p.rename(mapping, n);
}

SparsePolynomial sum_rotations(const SparsePolynomial& p) {
  SparsePolynomial out(p.num_vars());
  for (int k = 0; k < p.num_vars(); ++k) out += rotate(p, k);
  return out;
}

IdentityReport compare_polynomials(std::string identity, int k, std::optional<int> l,
                                   const SparsePolynomial& computed,
                                   const SparsePolynomial& expected) {
  IdentityReport report;
  report.identity = std::move(identity);
  report.k = k;
  report.l = l;
  const SparsePolynomial diff = computed - expected;
  report.pass = diff.is_zero();
  report.extra_terms = render(diff, true);
  report.missing_terms = render(diff, false);
  return report;
}

namespace {

/// Merge: x1 := 0, x0 := x0 - x2, then require x2 to vanish and
/// shift x_j -> x_{j-2} for j >= 3. Terms still mentioning x1 or x2 are kept
/// under their original names in a separate bucket so they surface as extras.
std::pair<SparsePolynomial, SparsePolynomial> merge_first_gap(const SparsePolynomial& p) {
  const int k = p.num_vars();
  const auto zero = SparsePolynomial(k);
  const auto shifted = SparsePolynomial::variable(k, 0) - SparsePolynomial::variable(k, 2);
  const SparsePolynomial substituted = p.substitute(1, zero).substitute(0, shifted);

  SparsePolynomial clean(k);
  SparsePolynomial leftover(k);
  for (const auto& [m, c] : substituted.terms()) {
    const bool stale = std::binary_search(m.begin(), m.end(), 1) ||
                       std::binary_search(m.begin(), m.end(), 2);
    (stale ? leftover : clean).add_term(m, c);
  }
  std::vector<int> mapping(static_cast<std::size_t>(k), 0);
  for (int j = 3; j < k; ++j) mapping[j] = j - 2;
  return {clean.rename(mapping, k - 2), leftover};
}

void absorb(IdentityReport& total, const IdentityReport& part, const std::string& label) {
  total.pass = total.pass && part.pass;
  for (const auto& t : part.missing_terms) total.missing_terms.push_back(label + ": " + t);
  for (const auto& t : part.extra_terms) total.extra_terms.push_back(label + ": " + t);
}

/// sum over 1<i0<i1<i2<K, i0,i2 even, i1 odd of x_{i0} x_{i1} x_{i2}.
SparsePolynomial inner_cubic(int k) {
  static constexpr std::array<int, 3> kPattern{0, 1, 0};
  SparsePolynomial p(k);
  for_each_parity_tuple(2, k, kPattern, [&](std::span<const int> idx) { add_product(p, idx, 1); });
  return p;
}

Rational half(int value) { return make_rational(value, 2); }

}  // namespace

IdentityReport check_continuity(int k) {
  require_odd_k(k, 5);
  IdentityReport total{"continuity", k, std::nullopt, true, {}, {}};
  const std::array<std::pair<const char*, SparsePolynomial (*)(int)>, 3> parts{{
      {"f3", &build_f3}, {"f5", &build_f5}, {"f", &build_f}}};
  for (const auto& [label, build] : parts) {
    auto [merged, leftover] = merge_first_gap(build(k));
    auto part = compare_polynomials("continuity", k, std::nullopt, merged, build(k - 2));
    const auto stale = render(leftover, true);
    const auto stale_negative = render(leftover, false);
    part.extra_terms.insert(part.extra_terms.end(), stale.begin(), stale.end());
    part.extra_terms.insert(part.extra_terms.end(), stale_negative.begin(), stale_negative.end());
    part.pass = part.pass && leftover.is_zero();
    absorb(total, part, label);
  }
  return total;
}

IdentityReport check_rotation_sum_identity(int k) {
  require_odd_k(k, 5);
  return compare_polynomials("rotation_sum", k, std::nullopt, sum_rotations(inner_cubic(k)),
                             half(k - 3) * build_f3(k));
}

IdentityReport check_fancy_sum(int k, int l) {
  require_odd_k(k, 5);
  if (l % 2 == 0 || l < 3 || l > k) {
    throw InvalidArgument("l must be odd with 3 <= l <= K");
  }
  // Base term at rotation 0: x_0 x_{i1} x_{i2} ... x_{i_{l-1}} with i_j = j (mod 2),
  // weighted by (K - i1 - 2)/2 for odd i1 < K-2.
  std::vector<int> tail_pattern;
  for (int j = 2; j < l; ++j) tail_pattern.push_back(j & 1);
  SparsePolynomial base(k);
  for (int i1 = 1; i1 < k - 2; i1 += 2) {
    const Rational weight = half(k - i1 - 2);
    for_each_parity_tuple(i1 + 1, k, tail_pattern, [&](std::span<const int> tail) {
      Monomial m{0, i1};
      m.insert(m.end(), tail.begin(), tail.end());
      base.add_term(std::move(m), weight);
    });
  }
  const Rational coefficient = make_rational((l - 1) * k, 2) - l;
  return compare_polynomials("fancy_sum", k, l, sum_rotations(base),
                             coefficient * build_alternating(k, l));
}

IdentityReport check_corollary_sums(int k) {
  require_odd_k(k, 5);
  SparsePolynomial cubic(k);
  SparsePolynomial quintic(k);
  static constexpr std::array<int, 1> kEven{0};
  static constexpr std::array<int, 3> kEvenOddEven{0, 1, 0};
  for (int i1 = 1; i1 < k - 2; i1 += 2) {
    const Rational weight = half(k - i1 - 2);
    for_each_parity_tuple(i1 + 1, k, kEven, [&](std::span<const int> idx) {
      cubic.add_term({0, i1, idx[0]}, weight);
    });
    for_each_parity_tuple(i1 + 1, k, kEvenOddEven, [&](std::span<const int> idx) {
      quintic.add_term({0, i1, idx[0], idx[1], idx[2]}, weight);
    });
  }
  IdentityReport total{"corollary_sums", k, std::nullopt, true, {}, {}};
  absorb(total,
         compare_polynomials("corollary_sums", k, 3, sum_rotations(cubic),
                             Rational(k - 3) * build_f3(k)),
         "cubic");
  absorb(total,
         compare_polynomials("corollary_sums", k, 5, sum_rotations(quintic),
                             Rational(2 * k - 5) * build_f5(k)),
         "quintic");
  return total;
}

CRotationReport check_c_rotation_sum(int k) {
  require_odd_k(k, 5);
  SparsePolynomial linear(k);
  for (int i = 2; i < k; i += 2) linear.add_term({i}, 1);
  const SparsePolynomial linear_sum = sum_rotations(linear);
  const SparsePolynomial cubic_sum = sum_rotations(inner_cubic(k));

  SparsePolynomial total_mass(k);
  for (int i = 0; i < k; ++i) total_mass.add_term({i}, 1);
  const SparsePolynomial f3 = build_f3(k);

  CRotationReport out;
  out.report = IdentityReport{"c_rotation_sum", k, std::nullopt, true, {}, {}};
  absorb(out.report,
         compare_polynomials("c_rotation_sum", k, std::nullopt, linear_sum,
                             half(k - 1) * total_mass),
         "linear");
  absorb(out.report,
         compare_polynomials("c_rotation_sum", k, std::nullopt, cubic_sum, half(k - 3) * f3),
         "cubic");

  // Read the coefficients off the computed sums so callers see what was found,
  // not what was expected.
  const auto lin = linear_sum.terms().find(Monomial{0});
  out.linear_coefficient = lin == linear_sum.terms().end() ? Rational(0) : lin->second;
  const auto& first_f3 = f3.terms().begin()->first;
  const auto cub = cubic_sum.terms().find(first_f3);
  out.cubic_coefficient = cub == cubic_sum.terms().end() ? Rational(0) : cub->second;
  return out;
}

}  // namespace herman
