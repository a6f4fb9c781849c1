#pragma once

// The n-fold exponential star product as a function of the Beltrami
// coefficients mu_j = beta_j / alpha_j, reproduced by the several-variable
// Cauchy integral formula on circles and checked for holomorphy in each mu_j.

#include <span>
#include <stdexcept>
#include <vector>

#include "mwqc/term_algebra.hpp"

namespace mwqc {

class CauchyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Nested quadrature costs nodes^n evaluations.
inline constexpr std::size_t kMaxCauchyDimension = 3;
inline constexpr int kMinContourNodes = 16;
inline constexpr int kDefaultContourNodes = 128;

struct ContourSpec {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  int nodes = kDefaultContourNodes;
};

/// F(mu_1, ..., mu_n) = (f_1 * ... * f_n)(z0) with f_j = exp(i alpha_j z) exp(i mu_j alpha_j zbar).
class MuFunction {
 public:
  /// Throws CauchyError for an empty list or a zero frequency.
  MuFunction(std::vector<Complex> alphas, Complex z0, double hbar);

  std::size_t arity() const noexcept { return alphas_.size(); }
  std::span<const Complex> alphas() const noexcept { return alphas_; }
  Complex z0() const noexcept { return z0_; }
  double hbar() const noexcept { return hbar_; }

  /// Builds each factor, takes the exact star product and evaluates it at z0.
  Complex operator()(std::span<const Complex> mus) const;

  /// Normal-ordered closed form: exp(i(sum alpha) z0 + sum_j c_j mu_j) with
  /// c_j = i [alpha_j zbar0 + hbar sum_{k != j} s_jk alpha_j alpha_k],
  /// s_jk = +1 for j < k and -1 for j > k.
  Complex closed_form(std::span<const Complex> mus) const;

  /// The coefficient c_j above, so d F / d mu_j = c_j F.
  Complex log_derivative(std::size_t j) const;

 private:
  std::vector<Complex> alphas_;
  Complex z0_;
  double hbar_;
};

/// Star-product route to F(mus); same as mf(mus).
Complex mu_function_eval(const MuFunction& mf, std::span<const Complex> mus);

/// Circles centred at 0 with radius 2 max(1, |mu_j|).
std::vector<ContourSpec> default_contours(std::span<const Complex> mus, int nodes = kDefaultContourNodes);

/// Iterated periodic-trapezoid evaluation of the Cauchy integral
///   F(mu) = (2 pi i)^-n oint ... oint F(zeta) / prod (zeta_j - mu_j) dzeta.
/// Throws CauchyError when a mu_j is not strictly inside its contour, a
/// contour has fewer than kMinContourNodes nodes, or sizes mismatch.
Complex cauchy_reproduce(const MuFunction& mf, std::span<const Complex> mus,
                         std::span<const ContourSpec> contours);

/// d^{m_1 + ... + m_n} F / d mu_1^{m_1} ... d mu_n^{m_n} from the Cauchy
/// derivative formula with kernel prod m_j! / (zeta_j - mu_j)^{m_j + 1}.
Complex cauchy_derivative(const MuFunction& mf, std::span<const Complex> mus,
                          std::span<const int> orders, std::span<const ContourSpec> contours);

/// Analytic derivative prod_j c_j^{m_j} F of the normal-ordered form.
Complex analytic_derivative(const MuFunction& mf, std::span<const Complex> mus, std::span<const int> orders);

/// |d F / d conj(mu_j)| by central differences along Re mu_j and Im mu_j.
double cr_residual(const MuFunction& mf, std::span<const Complex> mus, std::size_t j, double step);

/// |d/d mu_j d/d conj(mu_k) F| by nested central differences.
double cr_mixed_residual(const MuFunction& mf, std::span<const Complex> mus, std::size_t j,
                         std::size_t k, double step);

}  // namespace mwqc
