#include "mwqc/star_engine.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace mwqc {

namespace {

// Polynomial part of a term pair: z^m1 zbar^n1 (x) z^m2 zbar^n2 -> coefficient.
using PowerKey = std::array<int, 4>;
using TensorState = std::map<PowerKey, Complex>;

struct PairFrequencies {
  Complex alpha1, beta1, alpha2, beta2;

  Complex kappa() const { return symplectic_pairing(alpha1, beta1, alpha2, beta2); }
};

// Each Wirtinger derivative on a left or right factor splits into a
// derivation D on the polynomial part plus multiplication by i*frequency.
// Expanding the bidifferential operator
//   B = d_z (x) d_zbar - d_zbar (x) d_z
// gives B = N - kappa, where
//   N = D_z(x)D_zbar - D_zbar(x)D_z + i b2 D_z(x)1 + i a1 1(x)D_zbar
//       - i a2 D_zbar(x)1 - i b1 1(x)D_z
// lowers the total polynomial degree and commutes with the constant kappa.
TensorState apply_nilpotent(const TensorState& state, const PairFrequencies& fr) {
  TensorState out;
  for (const auto& [key, c] : state) {
    const auto [m1, n1, m2, n2] = key;
    if (m1 > 0 && n2 > 0) out[{m1 - 1, n1, m2, n2 - 1}] += c * static_cast<double>(m1 * n2);
    if (n1 > 0 && m2 > 0) out[{m1, n1 - 1, m2 - 1, n2}] -= c * static_cast<double>(n1 * m2);
    if (m1 > 0) out[{m1 - 1, n1, m2, n2}] += kI * fr.beta2 * static_cast<double>(m1) * c;
    if (n2 > 0) out[{m1, n1, m2, n2 - 1}] += kI * fr.alpha1 * static_cast<double>(n2) * c;
    if (n1 > 0) out[{m1, n1 - 1, m2, n2}] -= kI * fr.alpha2 * static_cast<double>(n1) * c;
    if (m2 > 0) out[{m1, n1, m2 - 1, n2}] -= kI * fr.beta1 * static_cast<double>(m2) * c;
  }
  return out;
}

TensorState apply_bidifferential(const TensorState& state, const PairFrequencies& fr) {
  TensorState out = apply_nilpotent(state, fr);
  const Complex kappa = fr.kappa();
  if (kappa != Complex{}) {
    for (const auto& [key, c] : state) out[key] -= kappa * c;
  }
  return out;
}

void accumulate(const TensorState& state, Complex weight, const Term& a, const Term& b,
                std::vector<Term>& raw) {
  const Complex prefactor = weight * a.coeff * b.coeff;
  for (const auto& [key, c] : state) {
    const auto [m1, n1, m2, n2] = key;
    raw.push_back(Term{prefactor * c, m1 + m2, n1 + n2, a.freq_z + b.freq_z,
                       a.freq_zbar + b.freq_zbar});
  }
}

TensorState initial_state(const Term& a, const Term& b) {
  return TensorState{{PowerKey{a.pow_z, a.pow_zbar, b.pow_z, b.pow_zbar}, Complex{1.0, 0.0}}};
}

PairFrequencies frequencies(const Term& a, const Term& b) {
  return PairFrequencies{a.freq_z, a.freq_zbar, b.freq_z, b.freq_zbar};
}

void check_degree(const StarExpr& f, const StarExpr& g) {
  const int d = f.degree() + g.degree();
  if (d > kMaxDegree) throw DegreeOverflowError(d);
}

}  // namespace

StarExpr star(const StarExpr& f, const StarExpr& g, const StarConfig& cfg) {
  if (cfg.truncation_order) return star_truncated(f, g, cfg.hbar, *cfg.truncation_order);
  if (!std::isfinite(cfg.hbar)) throw std::invalid_argument("hbar must be finite");
  check_degree(f, g);

  std::vector<Term> raw;
  for (const Term& a : f.terms()) {
    for (const Term& b : g.terms()) {
      const PairFrequencies fr = frequencies(a, b);
      const Complex phase = std::exp(-kI * cfg.hbar * fr.kappa());
      if (a.degree() == 0 && b.degree() == 0) {
        raw.push_back(Term{phase * a.coeff * b.coeff, 0, 0, a.freq_z + b.freq_z, a.freq_zbar + b.freq_zbar});
        continue;
      }
      // exp(i hbar N) terminates: N lowers the total degree by at least one.
      TensorState state = initial_state(a, b);
      Complex weight = phase;
      for (int j = 0; !state.empty() && j <= a.degree() + b.degree(); ++j) {
        if (j > 0) {
          state = apply_nilpotent(state, fr);
          weight *= kI * cfg.hbar / static_cast<double>(j);
          if (cfg.hbar == 0.0) break;
        }
        accumulate(state, weight, a, b, raw);
      }
    }
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr star(const StarExpr& f, const StarExpr& g, double hbar) {
  return star(f, g, StarConfig{hbar, std::nullopt});
}

StarExpr star_truncated(const StarExpr& f, const StarExpr& g, double hbar, int order) {
  if (order < 0) throw std::invalid_argument("truncation order must be nonnegative");
  if (!std::isfinite(hbar)) throw std::invalid_argument("hbar must be finite");
  check_degree(f, g);

  std::vector<Term> raw;
  for (const Term& a : f.terms()) {
    for (const Term& b : g.terms()) {
      const PairFrequencies fr = frequencies(a, b);
      TensorState state = initial_state(a, b);
      Complex weight{1.0, 0.0};
      for (int k = 0; k <= order && !state.empty(); ++k) {
        if (k > 0) {
          state = apply_bidifferential(state, fr);
          weight *= kI * hbar / static_cast<double>(k);
        }
        accumulate(state, weight, a, b, raw);
      }
    }
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr hbar_coefficient(const StarExpr& f, const StarExpr& g, int k) {
  if (k < 0) throw std::invalid_argument("series index must be nonnegative");
  check_degree(f, g);

  std::vector<Term> raw;
  for (const Term& a : f.terms()) {
    for (const Term& b : g.terms()) {
      const PairFrequencies fr = frequencies(a, b);
      TensorState state = initial_state(a, b);
      Complex weight{1.0, 0.0};
      for (int j = 1; j <= k && !state.empty(); ++j) {
        state = apply_bidifferential(state, fr);
        weight *= kI / static_cast<double>(j);
      }
      accumulate(state, weight, a, b, raw);
    }
  }
  return StarExpr::canonicalize(std::move(raw));
}

StarExpr poisson_bracket(const StarExpr& f, const StarExpr& g) {
  return sub(mul(d_z(f), d_zbar(g)), mul(d_zbar(f), d_z(g)));
}

StarExpr star_n(std::span<const StarExpr> fs, const StarConfig& cfg) {
  if (fs.empty()) throw std::invalid_argument("star_n needs at least one factor");
  StarExpr acc = fs.front();
  for (const StarExpr& f : fs.subspan(1)) acc = star(acc, f, cfg);
  return acc;
}

}  // namespace mwqc
