#include "mwqc/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mwqc {

namespace {

// Tolerance for accepting d_zbar f = mu d_z f as a symbolic identity.
constexpr double kProportionalityTolerance = 1e-12;

struct DerivativeSamples {
  std::vector<Complex> dz;
  std::vector<Complex> dzbar;
  std::vector<std::uint8_t> masked;
  std::size_t first_masked = std::numeric_limits<std::size_t>::max();
};

DerivativeSamples sample_derivatives(const StarExpr& f, const GridDomain& dom) {
  dom.validate();
  const StarExpr fz = d_z(f);
  const StarExpr fzbar = d_zbar(f);

  DerivativeSamples s;
  s.dz.resize(dom.size());
  s.dzbar.resize(dom.size());
  s.masked.assign(dom.size(), 0);
  double dz_max = 0.0;
  for (int iy = 0; iy < dom.ny; ++iy) {
    for (int ix = 0; ix < dom.nx; ++ix) {
      const std::size_t k = dom.index(ix, iy);
      const Complex w = dom.point(ix, iy);
      s.dz[k] = eval(fz, w);
      s.dzbar[k] = eval(fzbar, w);
      dz_max = std::max(dz_max, std::abs(s.dz[k]));
    }
  }
  const double threshold = kDzZeroTolerance * dz_max;
  for (std::size_t k = 0; k < s.dz.size(); ++k) {
    if (std::abs(s.dz[k]) <= threshold) {
      s.masked[k] = 1;
      s.first_masked = std::min(s.first_masked, k);
    }
  }
  return s;
}

// Trapezoid weight along one axis.
double edge_weight(int i, int n) noexcept { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

bool is_affine(const StarExpr& f) {
  return std::all_of(f.terms().begin(), f.terms().end(),
                     [](const Term& t) { return !t.has_frequency() && t.degree() <= 1; });
}

Complex z_coefficient(const StarExpr& f) {
  for (const Term& t : f.terms()) {
    if (t.pow_z == 1 && t.pow_zbar == 0) return t.coeff;
  }
  return {};
}

}  // namespace

void GridDomain::validate() const {
  if (!(re_min < re_max) || !(im_min < im_max)) {
    throw DomainError("grid bounds must satisfy re_min < re_max and im_min < im_max");
  }
  if (nx < 8 || ny < 8) throw DomainError("grid resolution must be at least 8 x 8");
}

std::size_t PointwiseField::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), std::uint8_t{1}));
}

std::optional<BeltramiValue> mu_exact(const StarExpr& f) {
  const StarExpr fz = d_z(f);
  if (fz.is_zero()) {
    throw BeltramiUndefinedError("d_z f vanishes identically; the Beltrami coefficient is undefined");
  }
  const StarExpr fzbar = d_zbar(f);
  if (fzbar.is_zero()) return BeltramiValue::constant(0.0);

  auto terms = fz.terms();
  const Term& lead = *std::max_element(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return std::abs(a.coeff) < std::abs(b.coeff);
  });
  auto partner = std::find_if(fzbar.terms().begin(), fzbar.terms().end(),
                              [&](const Term& t) { return same_key(t, lead); });
  if (partner == fzbar.terms().end()) return std::nullopt;

  const Complex mu = partner->coeff / lead.coeff;
  if (coefficient_distance(fzbar, scale(fz, mu)) > kProportionalityTolerance) return std::nullopt;
  return BeltramiValue::constant(mu);
}

BeltramiValue mu_grid(const StarExpr& f, const GridDomain& dom) {
  DerivativeSamples s = sample_derivatives(f, dom);
  BeltramiValue out;
  out.kind = BeltramiValue::Kind::pointwise_field;
  out.field.domain = dom;
  out.field.values.assign(dom.size(), Complex{});
  for (std::size_t k = 0; k < s.dz.size(); ++k) {
    if (!s.masked[k]) out.field.values[k] = s.dzbar[k] / s.dz[k];
  }
  out.field.masked = std::move(s.masked);
  if (out.field.masked_count() == dom.size()) {
    throw DegenerateInputError("d_z f vanishes at every grid point");
  }
  return out;
}

QCReport qc_certify(const StarExpr& f, const GridDomain& dom, double k_threshold) {
  if (!(k_threshold >= 0.0 && k_threshold < 1.0)) {
    throw std::invalid_argument("k_threshold must satisfy 0 <= k < 1");
  }
  const DerivativeSamples s = sample_derivatives(f, dom);

  QCReport r;
  r.k_threshold = k_threshold;
  r.note = "differential conditions only; homeomorphism not checked";

  double k_hat = -1.0;
  std::size_t argmax = 0;
  double l2_dz = 0.0;
  double l2_dzbar = 0.0;
  for (int iy = 0; iy < dom.ny; ++iy) {
    for (int ix = 0; ix < dom.nx; ++ix) {
      const std::size_t k = dom.index(ix, iy);
      const double w = edge_weight(ix, dom.nx) * edge_weight(iy, dom.ny);
      l2_dz += w * std::norm(s.dz[k]);
      l2_dzbar += w * std::norm(s.dzbar[k]);
      if (s.masked[k]) continue;
      const double ratio = std::abs(s.dzbar[k]) / std::abs(s.dz[k]);
      if (ratio > k_hat) {
        k_hat = ratio;
        argmax = k;
      }
    }
  }
  const double cell = dom.step_re() * dom.step_im();
  r.l2_dz = l2_dz * cell;
  r.l2_dzbar = l2_dzbar * cell;

  const auto to_point = [&](std::size_t k) {
    return dom.point(static_cast<int>(k % static_cast<std::size_t>(dom.nx)),
                     static_cast<int>(k / static_cast<std::size_t>(dom.nx)));
  };

  r.dz_nonvanishing = s.first_masked == std::numeric_limits<std::size_t>::max();
  r.k_hat = k_hat < 0.0 ? std::numeric_limits<double>::infinity() : k_hat;
  if (!r.dz_nonvanishing) {
    r.witness = to_point(s.first_masked);
    r.witness_kind = "dz-vanishes";
  } else {
    r.witness = to_point(argmax);
    r.witness_kind = "sup-ratio";
  }
  r.verdict = r.k_hat < k_threshold && r.dz_nonvanishing && std::isfinite(r.l2_dz) &&
              std::isfinite(r.l2_dzbar);
  return r;
}

ConformalMap ConformalMap::affine(Complex a, Complex b) {
  if (a == Complex{}) throw DomainError("affine map needs a nonzero linear coefficient");
  return ConformalMap(Kind::affine, a, b, {}, {});
}

ConformalMap ConformalMap::mobius(Complex a, Complex b, Complex c, Complex d) {
  if (a * d - b * c == Complex{}) throw DomainError("Moebius map needs ad - bc != 0");
  return ConformalMap(Kind::mobius, a, b, c, d);
}

Complex ConformalMap::operator()(Complex z) const noexcept {
  switch (kind_) {
    case Kind::affine:
      return a_ * z + b_;
    case Kind::mobius:
      return (a_ * z + b_) / (c_ * z + d_);
    case Kind::exponential:
      return std::exp(z);
  }
  return {};
}

Complex ConformalMap::derivative(Complex z) const noexcept {
  switch (kind_) {
    case Kind::affine:
      return a_;
    case Kind::mobius: {
      const Complex den = c_ * z + d_;
      return (a_ * d_ - b_ * c_) / (den * den);
    }
    case Kind::exponential:
      return std::exp(z);
  }
  return {};
}

void ConformalMap::check_domain(const GridDomain& dom) const {
  dom.validate();
  if (kind_ == Kind::mobius && c_ != Complex{}) {
    const Complex pole = -d_ / c_;
    // Stencil points reach slightly past the edges.
    const double margin = 0.01 * std::max(dom.re_max - dom.re_min, dom.im_max - dom.im_min);
    if (pole.real() >= dom.re_min - margin && pole.real() <= dom.re_max + margin &&
        pole.imag() >= dom.im_min - margin && pole.imag() <= dom.im_max + margin) {
      std::ostringstream os;
      os << "Moebius pole " << pole << " lies in the sampling domain";
      throw DomainError(os.str());
    }
  }
  if (kind_ == Kind::exponential && dom.im_max - dom.im_min >= 2.0 * std::numbers::pi) {
    throw DomainError("exp is not injective on a strip of height >= 2 pi");
  }
}

std::string ConformalMap::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::affine:
      os << "affine(a=" << a_ << ", b=" << b_ << ")";
      break;
    case Kind::mobius:
      os << "mobius(a=" << a_ << ", b=" << b_ << ", c=" << c_ << ", d=" << d_ << ")";
      break;
    case Kind::exponential:
      os << "exp";
      break;
  }
  return os.str();
}

double conformal_pullback_check(const StarExpr& f, const ConformalMap& phi, const GridDomain& dom) {
  phi.check_domain(dom);
  const auto mu = mu_exact(f);
  if (!mu) throw PatternError("conformal pullback check needs a constant Beltrami coefficient");
  const double target = std::abs(mu->value);

  const double h = 1e-3 * 0.5 * std::max(dom.re_max - dom.re_min, dom.im_max - dom.im_min);
  const auto g = [&](Complex w) { return eval(f, phi(w)); };
  // Fourth-order central difference along direction e.
  const auto directional = [&](Complex w, Complex e) {
    return (-g(w + 2.0 * h * e) + 8.0 * g(w + h * e) - 8.0 * g(w - h * e) + g(w - 2.0 * h * e)) /
           (12.0 * h);
  };

  double residual = 0.0;
  for (int iy = 0; iy < dom.ny; ++iy) {
    for (int ix = 0; ix < dom.nx; ++ix) {
      const Complex w = dom.point(ix, iy);
      const Complex gx = directional(w, 1.0);
      const Complex gy = directional(w, kI);
      const Complex gz = 0.5 * (gx - kI * gy);
      const Complex gzbar = 0.5 * (gx + kI * gy);
      residual = std::max(residual, std::abs(std::abs(gzbar) / std::abs(gz) - target));
    }
  }
  return residual;
}

StarExpr transform_mu(const StarExpr& f, double theta, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(theta)) {
    throw PatternError("dilatation must be a finite positive number");
  }
  const Complex factor = std::polar(lambda, theta);

  std::vector<Term> raw(f.terms().begin(), f.terms().end());
  Complex mu;
  if (is_affine(f) && z_coefficient(f) != Complex{}) {
    const Complex a = z_coefficient(f);
    Complex b{};
    for (Term& t : raw) {
      if (t.pow_zbar == 1) {
        b = t.coeff;
        t.coeff *= factor;
      }
    }
    mu = b / a;
  } else if (f.size() == 1 && f.terms()[0].degree() == 0 && f.terms()[0].freq_z != Complex{}) {
    mu = raw[0].freq_zbar / raw[0].freq_z;
    raw[0].freq_zbar *= factor;
  } else {
    throw PatternError("transform_mu needs an affine map with a != 0 or a single exponential with alpha != 0");
  }

  const double modulus = std::abs(factor * mu);
  if (modulus >= 1.0) {
    std::ostringstream os;
    os << "transformed Beltrami coefficient has modulus " << modulus << " >= 1";
    throw QuasiconformalBoundError(os.str(), modulus);
  }
  return StarExpr::canonicalize(std::move(raw));
}

MuTransform alignment_for(Complex mu_from, Complex mu_to) {
  if (mu_from == Complex{} || mu_to == Complex{}) {
    throw PatternError("rotation and dilatation cannot move mu to or from zero");
  }
  return MuTransform{std::arg(mu_to) - std::arg(mu_from), std::abs(mu_to) / std::abs(mu_from)};
}

StarExpr align_mu(const StarExpr& f, Complex target) {
  const auto mu = mu_exact(f);
  if (!mu) throw PatternError("align_mu needs a constant Beltrami coefficient");
  const MuTransform t = alignment_for(mu->value, target);
  return transform_mu(f, t.theta, t.lambda);
}

}  // namespace mwqc
