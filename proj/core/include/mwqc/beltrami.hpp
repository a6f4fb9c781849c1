#pragma once

// Beltrami coefficients mu = d_zbar f / d_z f, exact on the recognised
// constant-mu members of the family and pointwise on sample grids, plus the
// grid certification of the quasiconformal conditions.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwqc/term_algebra.hpp"

namespace mwqc {

class BeltramiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// d_z f vanishes identically, so the Beltrami equation does not define mu.
class BeltramiUndefinedError : public BeltramiError {
 public:
  using BeltramiError::BeltramiError;
};

/// Every grid point was masked.
class DegenerateInputError : public BeltramiError {
 public:
  using BeltramiError::BeltramiError;
};

class DomainError : public BeltramiError {
 public:
  using BeltramiError::BeltramiError;
};

class PatternError : public BeltramiError {
 public:
  using BeltramiError::BeltramiError;
};

/// A rotation/dilatation would leave the unit disc.
class QuasiconformalBoundError : public BeltramiError {
 public:
  QuasiconformalBoundError(const std::string& what, double modulus)
      : BeltramiError(what), modulus_(modulus) {}
  double modulus() const noexcept { return modulus_; }

 private:
  double modulus_;
};

/// A point counts as d_z f = 0 below this fraction of the grid maximum.
inline constexpr double kDzZeroTolerance = 1e-12;
inline constexpr double kDefaultKThreshold = 1.0 - 1e-9;

/// Rectangular sample grid on the z-plane, nx * ny points including the edges.
struct GridDomain {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
  int nx = 256;
  int ny = 256;

  /// Throws DomainError unless re_min < re_max, im_min < im_max and nx, ny >= 8.
  void validate() const;
  double step_re() const noexcept { return (re_max - re_min) / (nx - 1); }
  double step_im() const noexcept { return (im_max - im_min) / (ny - 1); }
  Complex point(int ix, int iy) const noexcept {
    return {re_min + ix * step_re(), im_min + iy * step_im()};
  }
  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
};

/// mu sampled on a grid; masked points have |d_z f| under the zero threshold.
struct PointwiseField {
  GridDomain domain;
  std::vector<Complex> values;
  std::vector<std::uint8_t> masked;

  std::size_t masked_count() const noexcept;
};

struct BeltramiValue {
  enum class Kind { exact_constant, pointwise_field };

  Kind kind = Kind::exact_constant;
  Complex value{};
  PointwiseField field;

  static BeltramiValue constant(Complex mu) { return {Kind::exact_constant, mu, {}}; }
};

/// Exact constant mu when d_zbar f is a constant multiple of d_z f (affine maps
/// with a != 0, single exponentials with alpha != 0, stars of exponentials).
/// Returns nullopt when mu is not constant. Throws BeltramiUndefinedError when
/// d_z f is identically zero.
std::optional<BeltramiValue> mu_exact(const StarExpr& f);

/// Pointwise d_zbar f / d_z f. Throws DegenerateInputError if every point is masked.
BeltramiValue mu_grid(const StarExpr& f, const GridDomain& dom);

struct QCReport {
  double k_hat = 0.0;
  bool dz_nonvanishing = true;
  double l2_dz = 0.0;
  double l2_dzbar = 0.0;
  bool verdict = false;
  double k_threshold = kDefaultKThreshold;
  Complex witness{};
  /// "sup-ratio" or "dz-vanishes".
  std::string witness_kind;
  /// Scope of the certificate; injectivity of f is not examined.
  std::string note;
};

/// Grid estimate of sup |d_zbar f| / |d_z f|, the d_z f != 0 scan, and
/// trapezoidal integrals of |d_z f|^2 and |d_zbar f|^2 over the domain.
QCReport qc_certify(const StarExpr& f, const GridDomain& dom, double k_threshold = kDefaultKThreshold);

/// Conformal maps from a fixed catalog: affine a*z + b (a != 0, covering
/// translations and complex scalings), Moebius (a z + b)/(c z + d), and exp(z)
/// on a horizontal strip of height below 2*pi.
class ConformalMap {
 public:
  enum class Kind { affine, mobius, exponential };

  static ConformalMap identity() { return affine(1.0, 0.0); }
  static ConformalMap translation(Complex t) { return affine(1.0, t); }
  static ConformalMap scaling(Complex s) { return affine(s, 0.0); }
  static ConformalMap affine(Complex a, Complex b);
  static ConformalMap mobius(Complex a, Complex b, Complex c, Complex d);
  static ConformalMap exponential() { return ConformalMap(Kind::exponential, {}, {}, {}, {}); }

  Kind kind() const noexcept { return kind_; }
  Complex operator()(Complex z) const noexcept;
  Complex derivative(Complex z) const noexcept;
  /// Throws DomainError when the map is not holomorphic and injective on dom.
  void check_domain(const GridDomain& dom) const;
  std::string describe() const;

 private:
  ConformalMap(Kind kind, Complex a, Complex b, Complex c, Complex d)
      : kind_(kind), a_(a), b_(b), c_(c), d_(d) {}

  Kind kind_;
  Complex a_, b_, c_, d_;
};

/// max over the grid of | |mu of f o phi| - |mu_f| |, with the Wirtinger
/// derivatives of f o phi taken by central differences of composed evaluations.
/// f must have a constant exact mu.
double conformal_pullback_check(const StarExpr& f, const ConformalMap& phi, const GridDomain& dom);

/// Replaces the zbar-side parameter (b for affine maps, beta for exponentials)
/// by exp(i theta) * lambda times itself, so mu becomes exp(i theta) lambda mu.
/// Throws PatternError for other shapes or lambda <= 0, and
/// QuasiconformalBoundError when the new |mu| >= 1.
StarExpr transform_mu(const StarExpr& f, double theta, double lambda);

/// Rotation angle and dilatation taking mu_f onto target.
struct MuTransform {
  double theta = 0.0;
  double lambda = 1.0;
};
MuTransform alignment_for(Complex mu_from, Complex mu_to);

/// transform_mu(f, ...) with the alignment onto target.
StarExpr align_mu(const StarExpr& f, Complex target);

}  // namespace mwqc
