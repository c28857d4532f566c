#pragma once

// Exact sparse multivariate polynomials over the rationals, and the
// rotation-sum / continuity identities of the alternating-parity polynomials
// checked as polynomial equalities.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "herman/rational.hpp"

namespace herman {

/// Sorted variable indices with repetition: {0, 0, 3} is x0^2 x3.
using Monomial = std::vector<int>;

class SparsePolynomial {
 public:
  explicit SparsePolynomial(int num_vars) : num_vars_(num_vars) {}

  static SparsePolynomial variable(int num_vars, int index);
  static SparsePolynomial constant(int num_vars, const Rational& value);

  int num_vars() const { return num_vars_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Adds coeff * monomial; the monomial need not be sorted. Zero results are erased.
  void add_term(Monomial monomial, const Rational& coeff);

  SparsePolynomial& operator+=(const SparsePolynomial& other);
  SparsePolynomial& operator-=(const SparsePolynomial& other);
  SparsePolynomial& operator*=(const Rational& scalar);

  friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial& b) { return a += b; }
  friend SparsePolynomial operator-(SparsePolynomial a, const SparsePolynomial& b) { return a -= b; }
  friend SparsePolynomial operator*(SparsePolynomial a, const Rational& s) { return a *= s; }
  friend SparsePolynomial operator*(const Rational& s, SparsePolynomial a) { return a *= s; }
  friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b);
  friend bool operator==(const SparsePolynomial&, const SparsePolynomial&) = default;

  /// Replaces every occurrence of x_var by `replacement` simultaneously
  /// (replacement may itself mention x_var).
  SparsePolynomial substitute(int var, const SparsePolynomial& replacement) const;

  /// Renames x_i to x_{mapping[i]}; mapping entries must be in [0, new_num_vars).
  SparsePolynomial rename(const std::vector<int>& mapping, int new_num_vars) const;

  bool mentions(int var) const;

  std::string to_string() const;

 private:
  int num_vars_;
  std::map<Monomial, Rational> terms_;
};

std::string monomial_to_string(const Monomial& m, const Rational& coeff);

/// Sum of x_{i_0} ... x_{i_{degree-1}} over 0 <= i_0 < ... < K with odd consecutive gaps.
SparsePolynomial build_alternating(int k, int degree);
SparsePolynomial build_f3(int k);
SparsePolynomial build_f5(int k);
SparsePolynomial build_f(int k);

/// x_i -> x_{(i+k) mod K}.
SparsePolynomial rotate(const SparsePolynomial& p, int k);
SparsePolynomial sum_rotations(const SparsePolynomial& p);

/// Outcome of an identity check. missing_terms are present on the expected side
/// but short on the computed side; extra_terms are the reverse.
struct IdentityReport {
  std::string identity;
  int k = 0;
  std::optional<int> l;
  bool pass = false;
  std::vector<std::string> missing_terms;
  std::vector<std::string> extra_terms;
};

/// Compares computed against expected and fills the term difference.
IdentityReport compare_polynomials(std::string identity, int k, std::optional<int> l,
                                   const SparsePolynomial& computed,
                                   const SparsePolynomial& expected);

/// f^(K)(x0, 0, x2, ...) = f^(K-2)(x0 + x2, x3, ...) for f3, f5 and f.
IdentityReport check_continuity(int k);

/// sum_k sum_{1<i0<i1<i2<K, i0,i2 even, i1 odd} x_{i0+k} x_{i1+k} x_{i2+k} = (K-3)/2 f3.
IdentityReport check_rotation_sum_identity(int k);

/// The weighted rotation sum over (x_k x_{i1+k} ...) equals ((l-1)K/2 - l) times the
/// degree-l alternating sum. l odd, 3 <= l <= K.
IdentityReport check_fancy_sum(int k, int l);

/// The two displayed degree-3 and degree-5 instances: (K-3) f3 and (2K-5) f5.
IdentityReport check_corollary_sums(int k);

struct CRotationReport {
  IdentityReport report;
  Rational linear_coefficient;  ///< expected (K-1)/2
  Rational cubic_coefficient;   ///< expected (K-3)/2
};

/// Summing the K rotations of the first-order critical-point expression: the linear
/// part gives (K-1)/2 * sum x_i and the cubic part (K-3)/2 * f3.
CRotationReport check_c_rotation_sum(int k);

}  // namespace herman
