#include "mwqc/term_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace mwqc {

namespace {

bool is_finite(Complex c) noexcept { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

bool complex_less(Complex a, Complex b) noexcept {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void validate(const Term& t, std::size_t index) {
  if (!is_finite(t.coeff) || !is_finite(t.freq_z) || !is_finite(t.freq_zbar)) {
    std::ostringstream os;
    os << "non-finite value in term " << index;
    throw NonFiniteTermError(index, os.str());
  }
  if (t.pow_z < 0 || t.pow_zbar < 0) {
    std::ostringstream os;
    os << "negative power in term " << index;
    throw AlgebraError(os.str());
  }
  if (t.degree() > kMaxDegree) throw DegreeOverflowError(t.degree());
}

Complex ipow(Complex base, int k) noexcept {
  Complex result{1.0, 0.0};
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

// Matches terms of g to terms of f by key; both canonical.
const Term* find_key(std::span<const Term> terms, const Term& probe) noexcept {
  for (const Term& t : terms) {
    if (same_key(t, probe)) return &t;
  }
  return nullptr;
}

}  // namespace

DegreeOverflowError::DegreeOverflowError(int degree)
    : AlgebraError("total degree " + std::to_string(degree) + " exceeds the limit of " +
                   std::to_string(kMaxDegree)),
      degree_(degree) {}

bool same_frequency(Complex a, Complex b) noexcept {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kFrequencyMergeTolerance * scale;
}

bool same_key(const Term& a, const Term& b) noexcept {
  return a.pow_z == b.pow_z && a.pow_zbar == b.pow_zbar && same_frequency(a.freq_z, b.freq_z) &&
         same_frequency(a.freq_zbar, b.freq_zbar);
}

bool key_less(const Term& a, const Term& b) noexcept {
  if (a.pow_z != b.pow_z) return a.pow_z < b.pow_z;
  if (a.pow_zbar != b.pow_zbar) return a.pow_zbar < b.pow_zbar;
  if (a.freq_z != b.freq_z) return complex_less(a.freq_z, b.freq_z);
  return complex_less(a.freq_zbar, b.freq_zbar);
}

StarExpr StarExpr::canonicalize(std::vector<Term> raw) {
  double raw_max = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    validate(raw[i], i);
    raw_max = std::max(raw_max, std::abs(raw[i].coeff));
  }
  std::stable_sort(raw.begin(), raw.end(), key_less);

  // Keys are grouped by (pow_z, pow_zbar) after sorting; frequency matching is
  // tolerant, so search the whole current group rather than only the last term.
  std::vector<Term> merged;
  merged.reserve(raw.size());
  std::size_t group_begin = 0;
  for (const Term& t : raw) {
    if (!merged.empty() && (merged.back().pow_z != t.pow_z || merged.back().pow_zbar != t.pow_zbar)) {
      group_begin = merged.size();
    }
    auto group = std::span<Term>(merged).subspan(group_begin);
    auto hit = std::find_if(group.begin(), group.end(), [&](const Term& m) { return same_key(m, t); });
    if (hit != group.end()) {
      hit->coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }

  const double threshold = kZeroPruneTolerance * raw_max;
  std::erase_if(merged, [&](const Term& t) { return std::abs(t.coeff) <= threshold; });
  std::stable_sort(merged.begin(), merged.end(), key_less);
  return StarExpr(std::move(merged));
}

StarExpr StarExpr::constant(Complex c) { return canonicalize({Term{c, 0, 0, {}, {}}}); }
StarExpr StarExpr::z() { return canonicalize({Term{1.0, 1, 0, {}, {}}}); }
StarExpr StarExpr::zbar() { return canonicalize({Term{1.0, 0, 1, {}, {}}}); }

StarExpr StarExpr::monomial(Complex coeff, int pow_z, int pow_zbar) {
  return canonicalize({Term{coeff, pow_z, pow_zbar, {}, {}}});
}

StarExpr StarExpr::exponential(Complex coeff, Complex alpha, Complex beta) {
  return canonicalize({Term{coeff, 0, 0, alpha, beta}});
}

StarExpr StarExpr::term(const Term& t) { return canonicalize({t}); }

StarExpr StarExpr::affine(Complex a, Complex b, Complex c) {
  return canonicalize({Term{a, 1, 0, {}, {}}, Term{b, 0, 1, {}, {}}, Term{c, 0, 0, {}, {}}});
}

bool StarExpr::is_constant() const noexcept {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_[0].degree() == 0 && !terms_[0].has_frequency());
}

int StarExpr::degree() const noexcept {
  int d = 0;
  for (const Term& t : terms_) d = std::max(d, t.degree());
  return d;
}

double StarExpr::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

bool operator==(const StarExpr& a, const StarExpr& b) noexcept {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    const Term& x = a.terms_[i];
    const Term& y = b.terms_[i];
    if (x.coeff != y.coeff || x.pow_z != y.pow_z || x.pow_zbar != y.pow_zbar ||
        x.freq_z != y.freq_z || x.freq_zbar != y.freq_zbar) {
      return false;
    }
  }
  return true;
}

StarExpr add(const StarExpr& f, const StarExpr& g) {
  std::vector<Term> raw(f.terms().begin(), f.terms().end());
  raw.insert(raw.end(), g.terms().begin(), g.terms().end());
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr sub(const StarExpr& f, const StarExpr& g) { return add(f, neg(g)); }

StarExpr neg(const StarExpr& f) { return scale(f, -1.0); }

StarExpr scale(const StarExpr& f, Complex c) {
  std::vector<Term> raw(f.terms().begin(), f.terms().end());
  for (Term& t : raw) t.coeff *= c;
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr mul(const StarExpr& f, const StarExpr& g) {
  std::vector<Term> raw;
  raw.reserve(f.size() * g.size());
  for (const Term& a : f.terms()) {
    for (const Term& b : g.terms()) {
      raw.push_back(Term{a.coeff * b.coeff, a.pow_z + b.pow_z, a.pow_zbar + b.pow_zbar,
                         a.freq_z + b.freq_z, a.freq_zbar + b.freq_zbar});
    }
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr power(const StarExpr& f, unsigned k) {
  StarExpr result = StarExpr::constant(1.0);
  StarExpr base = f;
  while (k > 0) {
    if (k & 1u) result = mul(result, base);
    k >>= 1u;
    if (k > 0) base = mul(base, base);
  }
  return result;
}

StarExpr conj(const StarExpr& f) {
  std::vector<Term> raw;
  raw.reserve(f.size());
  for (const Term& t : f.terms()) {
    raw.push_back(Term{std::conj(t.coeff), t.pow_zbar, t.pow_z, -std::conj(t.freq_zbar),
                       -std::conj(t.freq_z)});
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr d_z(const StarExpr& f) {
  std::vector<Term> raw;
  raw.reserve(2 * f.size());
  for (const Term& t : f.terms()) {
    if (t.pow_z > 0) {
      raw.push_back(Term{t.coeff * static_cast<double>(t.pow_z), t.pow_z - 1, t.pow_zbar,
                         t.freq_z, t.freq_zbar});
    }
    if (t.freq_z != Complex{}) raw.push_back(Term{kI * t.freq_z * t.coeff, t.pow_z, t.pow_zbar,
                                                 t.freq_z, t.freq_zbar});
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr d_zbar(const StarExpr& f) {
  std::vector<Term> raw;
  raw.reserve(2 * f.size());
  for (const Term& t : f.terms()) {
    if (t.pow_zbar > 0) {
      raw.push_back(Term{t.coeff * static_cast<double>(t.pow_zbar), t.pow_z, t.pow_zbar - 1,
                         t.freq_z, t.freq_zbar});
    }
    if (t.freq_zbar != Complex{}) raw.push_back(Term{kI * t.freq_zbar * t.coeff, t.pow_z,
                                                    t.pow_zbar, t.freq_z, t.freq_zbar});
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr d_x(const StarExpr& f) { return add(d_z(f), d_zbar(f)); }

StarExpr d_y(const StarExpr& f) { return scale(sub(d_z(f), d_zbar(f)), kI); }

Complex eval_term(const Term& t, Complex z0) noexcept {
  const Complex phase = std::exp(kI * (t.freq_z * z0 + t.freq_zbar * std::conj(z0)));
  return t.coeff * ipow(z0, t.pow_z) * ipow(std::conj(z0), t.pow_zbar) * phase;
}

Complex eval(const StarExpr& f, Complex z0) {
  if (!is_finite(z0)) throw AlgebraError("evaluation point is not finite");
  Complex sum{0.0, 0.0};
  for (const Term& t : f.terms()) sum += eval_term(t, z0);
  if (is_finite(sum)) return sum;

  std::size_t worst = 0;
  double worst_mag = -1.0;
  auto terms = f.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Complex v = eval_term(terms[i], z0);
    const double mag = is_finite(v) ? std::abs(v) : std::numeric_limits<double>::infinity();
    if (mag > worst_mag) {
      worst_mag = mag;
      worst = i;
    }
  }
  std::ostringstream os;
  os << "evaluation overflow at z = " << z0 << ", dominated by term " << worst;
  throw EvalOverflowError(worst, terms[worst], os.str());
}

double coefficient_distance(const StarExpr& f, const StarExpr& g) {
  const double scale_ref = std::max(f.max_abs_coeff(), g.max_abs_coeff());
  double diff = 0.0;
  for (const Term& a : f.terms()) {
    const Term* b = find_key(g.terms(), a);
    diff = std::max(diff, std::abs(a.coeff - (b ? b->coeff : Complex{})));
  }
  for (const Term& b : g.terms()) {
    if (!find_key(f.terms(), b)) diff = std::max(diff, std::abs(b.coeff));
  }
  return scale_ref > 0.0 ? diff / scale_ref : diff;
}

bool approx_equal(const StarExpr& f, const StarExpr& g, double rel_tol) {
  return coefficient_distance(f, g) <= rel_tol;
}

}  // namespace mwqc
