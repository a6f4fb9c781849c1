#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mwqc/beltrami.hpp"
#include "mwqc/star_engine.hpp"
#include "support/oracles.hpp"

namespace {

using namespace mwqc;
using namespace mwqc::testing;

Complex exact_mu(const StarExpr& f) {
  const auto mu = mu_exact(f);
  EXPECT_TRUE(mu.has_value());
  return mu ? mu->value : Complex{std::nan(""), 0.0};
}

TEST(MuExact, Examples) {
  EXPECT_LE(std::abs(exact_mu(StarExpr::affine(1.0, 0.5, 0.0)) - 0.5), 1e-15);
  const StarExpr e = mul(StarExpr::exponential(1.0, 1.0, 0.0), StarExpr::exponential(1.0, 0.0, 0.3));
  EXPECT_LE(std::abs(exact_mu(e) - 0.3), 1e-15);
  EXPECT_EQ(exact_mu(StarExpr::exponential(1.0, 1.0, 0.0)), Complex(0.0));
}

TEST(MuExact, StarOfExponentials) {
  std::mt19937_64 rng(30);
  for (int t = 0; t < 100; ++t) {
    const Complex a1 = rand_nonzero(rng, 1.0, 0.2), a2 = rand_nonzero(rng, 1.0, 0.2);
    if (std::abs(a1 + a2) < 0.2) continue;
    const Complex b1 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0);
    const StarExpr f1 = StarExpr::exponential(1.0, a1, b1), f2 = StarExpr::exponential(1.0, a2, b2);
    for (const double hbar : {0.0, 0.5, 1.0, 2.0}) {
      const Complex mu = exact_mu(star(f1, f2, hbar));
      EXPECT_LE(std::abs(mu * (a1 + a2) - (b1 + b2)), 1e-12 * std::max(1.0, std::abs(b1 + b2)));
    }
  }
}

TEST(MuExact, UndefinedAndNotConstant) {
  EXPECT_THROW((void)mu_exact(StarExpr::zbar()), BeltramiUndefinedError);
  EXPECT_THROW((void)mu_exact(StarExpr::exponential(1.0, 0.0, 0.4)), BeltramiUndefinedError);
  EXPECT_THROW((void)mu_exact(StarExpr::constant(2.0)), BeltramiUndefinedError);
  // Sum of frequencies cancels: d_z vanishes identically.
  const StarExpr cancel = mul(StarExpr::exponential(1.0, 1.0, 0.2), StarExpr::exponential(1.0, -1.0, 0.3));
  EXPECT_THROW((void)mu_exact(cancel), BeltramiUndefinedError);
  EXPECT_FALSE(mu_exact(StarExpr::monomial(1.0, 1, 1)).has_value());
  EXPECT_FALSE(mu_exact(add(StarExpr::z(), StarExpr::monomial(0.5, 0, 2))).has_value());
}

TEST(MuGrid, ConstantField) {
  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, 32, 32};
  const BeltramiValue v = mu_grid(StarExpr::affine(1.0, 0.5, 0.0), dom);
  ASSERT_EQ(v.kind, BeltramiValue::Kind::pointwise_field);
  ASSERT_EQ(v.field.values.size(), dom.size());
  EXPECT_EQ(v.field.masked_count(), 0u);
  for (const Complex m : v.field.values) EXPECT_LE(std::abs(m - 0.5), 1e-15);
}

TEST(MuGrid, AgreesWithExact) {
  std::mt19937_64 rng(31);
  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, 24, 24};
  for (int t = 0; t < 20; ++t) {
    const Complex a = rand_nonzero(rng, 1.0, 0.2);
    const StarExpr f = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a, rand_disc(rng, 0.9) * a);
    const Complex mu = exact_mu(f);
    const BeltramiValue v = mu_grid(f, dom);
    for (std::size_t k = 0; k < v.field.values.size(); ++k) {
      if (!v.field.masked[k]) EXPECT_LE(std::abs(v.field.values[k] - mu), 1e-10 * std::max(1.0, std::abs(mu)));
    }
  }
}

TEST(MuGrid, ZbarIsFullyMasked) {
  EXPECT_THROW((void)mu_grid(StarExpr::zbar(), GridDomain{}), DegenerateInputError);
}

TEST(MuGrid, ZZbarGivesUnitModulusField) {
  const GridDomain dom{0.1, 1.0, 0.1, 1.0, 16, 16};  // avoids z = 0
  const BeltramiValue v = mu_grid(StarExpr::monomial(1.0, 1, 1), dom);
  for (int iy = 0; iy < dom.ny; ++iy) {
    for (int ix = 0; ix < dom.nx; ++ix) {
      const Complex w = dom.point(ix, iy);
      const Complex m = v.field.values[dom.index(ix, iy)];
      EXPECT_LE(std::abs(m - w / std::conj(w)), 1e-14);
      EXPECT_NEAR(std::abs(m), 1.0, 1e-14);
    }
  }
}

TEST(MuGrid, InvalidDomain) {
  EXPECT_THROW((void)mu_grid(StarExpr::z(), GridDomain{1.0, -1.0, -1.0, 1.0, 16, 16}), DomainError);
  EXPECT_THROW((void)mu_grid(StarExpr::z(), GridDomain{-1.0, 1.0, -1.0, 1.0, 4, 16}), DomainError);
}

TEST(QcCertify, Examples) {
  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, 64, 64};
  const QCReport a = qc_certify(StarExpr::affine(1.0, 0.5, 0.0), dom);
  EXPECT_TRUE(a.verdict);
  EXPECT_NEAR(a.k_hat, 0.5, 1e-15);

  const QCReport b = qc_certify(StarExpr::affine(0.1, 1.0, 0.0), dom);
  EXPECT_FALSE(b.verdict);
  EXPECT_NEAR(b.k_hat, 10.0, 1e-12);
  EXPECT_EQ(b.witness_kind, "sup-ratio");

  const QCReport c = qc_certify(StarExpr::z(), dom);
  EXPECT_TRUE(c.verdict);
  EXPECT_EQ(c.k_hat, 0.0);

  const QCReport d = qc_certify(StarExpr::zbar(), dom);
  EXPECT_FALSE(d.verdict);
  EXPECT_FALSE(d.dz_nonvanishing);
  EXPECT_EQ(d.witness_kind, "dz-vanishes");
  EXPECT_FALSE(d.note.empty());
}

TEST(QcCertify, RatioOneFailsAndL2Integrals) {
  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, 64, 64};
  EXPECT_FALSE(qc_certify(StarExpr::affine(1.0, 1.0, 0.0), dom).verdict);
  // |d_z f|^2 = 4, |d_zbar f|^2 = 1 on an area-4 square.
  const QCReport r = qc_certify(StarExpr::affine(2.0, 1.0, 0.0), dom);
  EXPECT_NEAR(r.l2_dz, 16.0, 1e-12);
  EXPECT_NEAR(r.l2_dzbar, 4.0, 1e-12);
  EXPECT_THROW((void)qc_certify(StarExpr::z(), dom, 1.0), std::invalid_argument);
}

TEST(QcCertify, MatchesAnalyticModulus) {
  std::mt19937_64 rng(32);
  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, 48, 48};
  for (int t = 0; t < 50; ++t) {
    const double m = t % 2 == 0 ? uniform(rng, 0.0, 0.95) : uniform(rng, 1.05, 2.0);
    const Complex mu = std::polar(m, uniform(rng, 0.0, 2 * std::numbers::pi));
    const Complex a = rand_nonzero(rng, 1.0, 0.3);
    const StarExpr f = t % 4 < 2 ? StarExpr::affine(a, mu * a, 0.0) : StarExpr::exponential(1.0, a, mu * a);
    const QCReport r = qc_certify(f, dom);
    EXPECT_EQ(r.verdict, m < 1.0) << "case " << t;
    EXPECT_NEAR(r.k_hat, m, 1e-12);
  }
}

TEST(Conformal, Examples) {
  const GridDomain square{-1.0, 1.0, -1.0, 1.0, 64, 64};
  const StarExpr affine = StarExpr::affine(1.0, 0.4, 0.0);
  EXPECT_LE(conformal_pullback_check(affine, ConformalMap::affine(2.0, 1.0), square), 1e-10);
  EXPECT_LE(conformal_pullback_check(affine, ConformalMap::identity(), square), 1e-12);

  const StarExpr e = StarExpr::exponential(1.0, 1.0, 0.25);
  const GridDomain upper{-1.0, 1.0, 0.1, 2.1, 64, 64};
  EXPECT_LE(conformal_pullback_check(e, ConformalMap::mobius(1.0, -kI, 1.0, kI), upper), 1e-6);
  EXPECT_LE(conformal_pullback_check(e, ConformalMap::exponential(), square), 1e-6);
}

TEST(Conformal, PoleInsideDomain) {
  const GridDomain square{-1.0, 1.0, -1.0, 1.0, 32, 32};
  const ConformalMap m = ConformalMap::mobius(1.0, -kI, 1.0, kI);  // pole at -i
  EXPECT_THROW(m.check_domain(square), DomainError);
  EXPECT_THROW((void)conformal_pullback_check(StarExpr::affine(1.0, 0.4, 0.0), m, square), DomainError);
  EXPECT_THROW(ConformalMap::exponential().check_domain(GridDomain{-1.0, 1.0, -4.0, 4.0, 16, 16}), DomainError);
  EXPECT_THROW((void)ConformalMap::affine(0.0, 1.0), DomainError);
}

TEST(Conformal, MapValuesAndDerivatives) {
  const ConformalMap m = ConformalMap::mobius(1.0, -kI, 1.0, kI);
  const Complex w{0.3, 0.7};
  EXPECT_LE(std::abs(m(w) - (w - kI) / (w + kI)), 1e-15);
  EXPECT_LE(std::abs(m.derivative(w) - 2.0 * kI / ((w + kI) * (w + kI))), 1e-14);
  EXPECT_LE(std::abs(ConformalMap::exponential().derivative(w) - std::exp(w)), 1e-15);
}

TEST(TransformMu, RotationAndDilatation) {
  const StarExpr f = StarExpr::affine(1.0, 0.5, 0.0);
  EXPECT_LE(std::abs(exact_mu(transform_mu(f, std::numbers::pi, 1.0)) + 0.5), 1e-15);
  EXPECT_LE(std::abs(exact_mu(transform_mu(f, 0.0, 1.5)) - 0.75), 1e-15);
  const StarExpr e = StarExpr::exponential(2.0, 1.0, 0.3);
  EXPECT_LE(std::abs(exact_mu(transform_mu(e, std::numbers::pi / 2, 2.0)) - Complex(0.0, 0.6)), 1e-15);
}

TEST(TransformMu, Errors) {
  const StarExpr f = StarExpr::affine(1.0, 0.5, 0.0);
  try {
    (void)transform_mu(f, 0.0, 2.0);
    FAIL() << "expected QuasiconformalBoundError";
  } catch (const QuasiconformalBoundError& e) {
    EXPECT_DOUBLE_EQ(e.modulus(), 1.0);
  }
  EXPECT_THROW((void)transform_mu(f, 0.0, -1.0), PatternError);
  EXPECT_THROW((void)transform_mu(StarExpr::monomial(1.0, 2, 0), 0.0, 1.0), PatternError);
}

TEST(TransformMu, AlignMakesBracketVanish) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 50; ++t) {
    const Complex a1 = rand_nonzero(rng, 1.0, 0.2), a2 = rand_nonzero(rng, 1.0, 0.2);
    Complex m1, m2;
    do {
      m1 = rand_disc(rng, 0.9);
      m2 = rand_disc(rng, 0.9);
    } while (std::abs(m1) < 0.05 || std::abs(m2) < 0.05);
    const StarExpr f1 = StarExpr::exponential(1.0, a1, m1 * a1);
    const StarExpr f2 = StarExpr::exponential(1.0, a2, m2 * a2);
    const StarExpr aligned = align_mu(f1, m2);
    EXPECT_LE(std::abs(exact_mu(aligned) - m2), 1e-14);
    EXPECT_TRUE(poisson_bracket(aligned, f2).is_zero());
  }
}

}  // namespace
