#pragma once

// Exact pointwise algebra and Wirtinger calculus on the family of finite sums
//
//     c * z^m * zbar^n * exp(i(alpha*z + beta*zbar)),
//
// which is closed under +, *, complex conjugation, d/dz, d/dzbar and the
// Moyal-Weyl star product.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwqc {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Largest total polynomial degree m + n accepted in a term.
inline constexpr int kMaxDegree = 64;

/// Frequencies closer than this (relative to max(1, |a|, |b|)) share a key.
inline constexpr double kFrequencyMergeTolerance = 1e-12;

/// Merged coefficients at or below this fraction of the largest raw
/// coefficient are dropped.
inline constexpr double kZeroPruneTolerance = 1e-14;

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteTermError : public AlgebraError {
 public:
  NonFiniteTermError(std::size_t index, const std::string& what)
      : AlgebraError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class DegreeOverflowError : public AlgebraError {
 public:
  explicit DegreeOverflowError(int degree);
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

/// One generator coeff * z^pow_z * zbar^pow_zbar * exp(i(freq_z*z + freq_zbar*zbar)).
struct Term {
  Complex coeff{0.0, 0.0};
  int pow_z = 0;
  int pow_zbar = 0;
  Complex freq_z{0.0, 0.0};
  Complex freq_zbar{0.0, 0.0};

  int degree() const noexcept { return pow_z + pow_zbar; }
  bool has_frequency() const noexcept {
    return freq_z != Complex{} || freq_zbar != Complex{};
  }
};

bool same_frequency(Complex a, Complex b) noexcept;

/// True when the two terms have the same (pow_z, pow_zbar, freq_z, freq_zbar) key.
bool same_key(const Term& a, const Term& b) noexcept;

/// Canonical order: (pow_z, pow_zbar, freq_z, freq_zbar), complex values by (Re, Im).
bool key_less(const Term& a, const Term& b) noexcept;

class EvalOverflowError : public AlgebraError {
 public:
  EvalOverflowError(std::size_t term_index, Term term, const std::string& what)
      : AlgebraError(what), term_index_(term_index), term_(term) {}
  std::size_t term_index() const noexcept { return term_index_; }
  const Term& term() const noexcept { return term_; }

 private:
  std::size_t term_index_;
  Term term_;
};

/// Canonical finite sum of terms. Immutable once built; the default value is
/// the zero function.
class StarExpr {
 public:
  StarExpr() = default;

  /// Merges duplicate keys, prunes cancelled coefficients and sorts.
  /// Throws NonFiniteTermError naming the first non-finite term and
  /// DegreeOverflowError when a term exceeds kMaxDegree.
  static StarExpr canonicalize(std::vector<Term> raw);

  static StarExpr constant(Complex c);
  static StarExpr z();
  static StarExpr zbar();
  static StarExpr monomial(Complex coeff, int pow_z, int pow_zbar);
  /// coeff * exp(i(alpha*z + beta*zbar))
  static StarExpr exponential(Complex coeff, Complex alpha, Complex beta);
  static StarExpr term(const Term& t);
  /// a*z + b*zbar + c
  static StarExpr affine(Complex a, Complex b, Complex c);

  std::span<const Term> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  /// Maximum m + n over the terms (0 for the zero function).
  int degree() const noexcept;
  double max_abs_coeff() const noexcept;

  /// Exact structural equality of canonical forms.
  friend bool operator==(const StarExpr& a, const StarExpr& b) noexcept;

 private:
  explicit StarExpr(std::vector<Term> canonical) : terms_(std::move(canonical)) {}

  std::vector<Term> terms_;
};

StarExpr add(const StarExpr& f, const StarExpr& g);
StarExpr sub(const StarExpr& f, const StarExpr& g);
StarExpr neg(const StarExpr& f);
StarExpr scale(const StarExpr& f, Complex c);
StarExpr mul(const StarExpr& f, const StarExpr& g);
/// f^k by repeated squaring; k = 0 gives 1.
StarExpr power(const StarExpr& f, unsigned k);

/// Complex conjugate as a function: (c, m, n, a, b) -> (conj c, n, m, -conj b, -conj a).
StarExpr conj(const StarExpr& f);

StarExpr d_z(const StarExpr& f);
StarExpr d_zbar(const StarExpr& f);
/// d_x = d_z + d_zbar
StarExpr d_x(const StarExpr& f);
/// d_y = i (d_z - d_zbar)
StarExpr d_y(const StarExpr& f);

/// Throws EvalOverflowError (with the dominating term) if the value is not finite.
Complex eval(const StarExpr& f, Complex z0);
Complex eval_term(const Term& t, Complex z0) noexcept;

/// Largest coefficient mismatch between f and g after matching keys, divided
/// by the largest coefficient magnitude of either side (absolute when both
/// are zero). Unmatched terms count with their full magnitude.
double coefficient_distance(const StarExpr& f, const StarExpr& g);

/// coefficient_distance(f, g) <= rel_tol
bool approx_equal(const StarExpr& f, const StarExpr& g, double rel_tol);

inline StarExpr operator+(const StarExpr& f, const StarExpr& g) { return add(f, g); }
inline StarExpr operator-(const StarExpr& f, const StarExpr& g) { return sub(f, g); }
inline StarExpr operator-(const StarExpr& f) { return neg(f); }
inline StarExpr operator*(const StarExpr& f, const StarExpr& g) { return mul(f, g); }
inline StarExpr operator*(Complex c, const StarExpr& f) { return scale(f, c); }

}  // namespace mwqc
