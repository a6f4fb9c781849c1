#pragma once

// Moyal-Weyl star product
//
//     f * g = f exp[i hbar (<-d_z ->d_zbar - <-d_zbar ->d_z)] g
//
// on the polynomial x linear-exponential family, resummed exactly, plus its
// hbar-series coefficients and the Poisson bracket it generates.

#include <optional>
#include <span>

#include "mwqc/term_algebra.hpp"

namespace mwqc {

struct StarConfig {
  double hbar = 0.0;
  /// Absent: exact (resummed) product. Present: partial sum up to this power of hbar.
  std::optional<int> truncation_order;
};

/// Exact star product, or star_truncated when cfg.truncation_order is set.
StarExpr star(const StarExpr& f, const StarExpr& g, const StarConfig& cfg);
StarExpr star(const StarExpr& f, const StarExpr& g, double hbar);

/// sum_{k <= order} hbar^k F^(k)
StarExpr star_truncated(const StarExpr& f, const StarExpr& g, double hbar, int order);

/// The exact coefficient F^(k) of hbar^k in f * g.
StarExpr hbar_coefficient(const StarExpr& f, const StarExpr& g, int k);

/// {f, g} = d_z f d_zbar g - d_zbar f d_z g
StarExpr poisson_bracket(const StarExpr& f, const StarExpr& g);

/// Left fold f1 * f2 * ... * fn. Throws std::invalid_argument on an empty list.
StarExpr star_n(std::span<const StarExpr> fs, const StarConfig& cfg);

/// alpha1*beta2 - beta1*alpha2 for two frequency pairs; the exact phase of the
/// star product of two pure exponentials is exp(-i hbar kappa).
inline Complex symplectic_pairing(Complex alpha1, Complex beta1, Complex alpha2, Complex beta2) {
  return alpha1 * beta2 - beta1 * alpha2;
}

}  // namespace mwqc
