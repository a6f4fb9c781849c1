#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "mwqc/star_engine.hpp"
#include "support/oracles.hpp"

namespace {

using namespace mwqc;
using namespace mwqc::testing;

TEST(Star, AffineClosedForm) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 100; ++t) {
    const Complex a1 = rand_box(rng, 1.0), b1 = rand_box(rng, 1.0), c1 = rand_box(rng, 1.0);
    const Complex a2 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0), c2 = rand_box(rng, 1.0);
    const double hbar = uniform(rng, -2.0, 2.0);
    const StarExpr f1 = StarExpr::affine(a1, b1, c1), f2 = StarExpr::affine(a2, b2, c2);
    const StarExpr expected = add(mul(f1, f2), StarExpr::constant(kI * hbar * (a1 * b2 - b1 * a2)));
    EXPECT_LE(coefficient_distance(star(f1, f2, hbar), expected), 1e-12);
  }
}

TEST(Star, ConcreteAffineExample) {
  const StarExpr f = StarExpr::affine(2.0, 1.0, 0.0);
  const StarExpr g = StarExpr::affine(3.0, -1.0, 0.0);
  const StarExpr expected = sub(mul(f, g), StarExpr::constant(Complex{0.0, 5.0}));
  EXPECT_EQ(star(f, g, 1.0), expected);
  // The order-1 series terminates on affine inputs.
  EXPECT_EQ(star_truncated(f, g, 1.0, 1), expected);
}

TEST(Star, ExponentialPhase) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Complex a1 = rand_box(rng, 1.0), b1 = rand_box(rng, 1.0);
    const Complex a2 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0);
    const double hbar = uniform(rng, -2.0, 2.0);
    const StarExpr f1 = StarExpr::exponential(1.0, a1, b1), f2 = StarExpr::exponential(1.0, a2, b2);
    const Complex phase = std::exp(-kI * hbar * (a1 * b2 - b1 * a2));
    EXPECT_LE(coefficient_distance(star(f1, f2, hbar), scale(mul(f1, f2), phase)), 1e-12);
  }
}

// Exact resummation against the defining bidifferential series, pointwise.
TEST(Star, MatchesDefiningSeries) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 40; ++t) {
    const StarExpr f = rand_expr(rng, 2, 2, 0.6);
    const StarExpr g = rand_expr(rng, 2, 2, 0.6);
    const double hbar = uniform(rng, -1.0, 1.0);
    const StarExpr fg = star(f, g, hbar);
    for (int s = 0; s < 4; ++s) {
      const Complex w = rand_box(rng, 0.8);
      EXPECT_LE(rel_err(eval(fg, w), star_series_at(f, g, hbar, w)), 1e-10) << "trial " << t;
    }
  }
}

TEST(Star, ZeroHbarIsPointwise) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const StarExpr f = rand_expr(rng), g = rand_expr(rng);
    EXPECT_EQ(star(f, g, 0.0), mul(f, g));
  }
}

TEST(Star, Associativity) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 100; ++t) {
    const StarExpr f = StarExpr::term(rand_term(rng, 2, 1.0));
    const StarExpr g = StarExpr::term(rand_term(rng, 2, 1.0));
    const StarExpr h = StarExpr::term(rand_term(rng, 2, 1.0));
    const double hbar = uniform(rng, -2.0, 2.0);
    EXPECT_LE(coefficient_distance(star(star(f, g, hbar), h, hbar), star(f, star(g, h, hbar), hbar)), 1e-10);
  }
}

TEST(Star, ConjugationCompatibility) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 50; ++t) {
    const StarExpr f = rand_expr(rng), g = rand_expr(rng);
    const double hbar = uniform(rng, -2.0, 2.0);
    EXPECT_LE(coefficient_distance(conj(star(f, g, hbar)), star(conj(f), conj(g), hbar)), 1e-12);
  }
}

TEST(Star, MoyalCommutatorAndCommutingCase) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 50; ++t) {
    const Complex a1 = rand_nonzero(rng, 1.0, 0.2), b1 = rand_box(rng, 1.0);
    const Complex a2 = rand_nonzero(rng, 1.0, 0.2), b2 = rand_box(rng, 1.0);
    const double hbar = uniform(rng, -2.0, 2.0);
    const StarExpr f = StarExpr::exponential(1.0, a1, b1), g = StarExpr::exponential(1.0, a2, b2);
    const Complex kappa = a1 * b2 - b1 * a2;
    const StarExpr comm = sub(star(f, g, hbar), star(g, f, hbar));
    const Complex expected = -2.0 * kI * std::sin(hbar * kappa);
    const Complex got = comm.is_zero() ? Complex{} : comm.terms()[0].coeff;
    EXPECT_LE(std::abs(got - expected), 1e-12 * std::max(1.0, std::abs(std::exp(kI * hbar * kappa))));

    const Complex mu = rand_disc(rng, 0.9);
    const StarExpr p = StarExpr::exponential(1.0, a1, mu * a1), q = StarExpr::exponential(1.0, a2, mu * a2);
    EXPECT_LE(coefficient_distance(star(p, q, hbar), star(q, p, hbar)), 1e-14);
  }
}

TEST(Star, DegreeBound) {
  const StarExpr big = StarExpr::monomial(1.0, 40, 0);
  EXPECT_THROW((void)star(big, StarExpr::monomial(1.0, 0, 30), 1.0), DegreeOverflowError);
}

TEST(Star, ConfigWithOrderDelegates) {
  const StarExpr f = StarExpr::exponential(1.0, 1.0, 0.2), g = StarExpr::exponential(1.0, 0.5, -0.4);
  EXPECT_EQ(star(f, g, StarConfig{0.7, 3}), star_truncated(f, g, 0.7, 3));
  EXPECT_THROW((void)star(f, g, std::nan("")), std::invalid_argument);
}

TEST(StarTruncated, LowOrders) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const StarExpr f = StarExpr::exponential(1.0, rand_box(rng, 1.0), rand_box(rng, 1.0));
    const StarExpr g = StarExpr::exponential(1.0, rand_box(rng, 1.0), rand_box(rng, 1.0));
    const double hbar = uniform(rng, -2.0, 2.0);
    EXPECT_EQ(star_truncated(f, g, hbar, 0), mul(f, g));
    EXPECT_LE(coefficient_distance(star_truncated(f, g, hbar, 1),
                                   add(mul(f, g), scale(poisson_bracket(f, g), kI * hbar))),
              1e-13);
  }
  EXPECT_THROW((void)star_truncated(StarExpr::z(), StarExpr::z(), 1.0, -1), std::invalid_argument);
}

// |R_N| <= |x|^{N+1}/(N+1)! e^{max(0, Re x)}, x = -i hbar kappa.
TEST(StarTruncated, RemainderBound) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 50; ++t) {
    const Complex a1 = rand_box(rng, 1.0), b1 = rand_box(rng, 1.0);
    const Complex a2 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0);
    const double hbar = uniform(rng, -2.0, 2.0);
    const StarExpr f = StarExpr::exponential(1.0, a1, b1), g = StarExpr::exponential(1.0, a2, b2);
    const Complex x = -kI * hbar * (a1 * b2 - b1 * a2);
    double bound = 1.0;
    for (int n = 0; n <= 15; ++n) {
      bound *= std::abs(x) / (n + 1);
      const StarExpr tr = star_truncated(f, g, hbar, n);
      const Complex c = tr.is_zero() ? Complex{} : tr.terms()[0].coeff;
      EXPECT_LE(std::abs(c - std::exp(x)), bound * std::exp(std::max(0.0, x.real())) + 1e-13 * std::exp(std::abs(x)));
    }
    EXPECT_LE(coefficient_distance(star_truncated(f, g, hbar, 40), star(f, g, hbar)), 1e-12);
  }
}

TEST(StarTruncated, PolynomialsTerminate) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 30; ++t) {
    std::vector<Term> a, b;
    for (int k = 0; k < 3; ++k) {
      a.push_back(Term{rand_box(rng, 1.0), rand_int(rng, 0, 2), rand_int(rng, 0, 2)});
      b.push_back(Term{rand_box(rng, 1.0), rand_int(rng, 0, 2), rand_int(rng, 0, 2)});
    }
    const StarExpr f = StarExpr::canonicalize(a), g = StarExpr::canonicalize(b);
    const double hbar = uniform(rng, -2.0, 2.0);
    EXPECT_LE(coefficient_distance(star_truncated(f, g, hbar, f.degree() + g.degree()), star(f, g, hbar)), 1e-13);
  }
}

TEST(HbarCoefficient, FirstTerms) {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 50; ++t) {
    const StarExpr f = rand_expr(rng), g = rand_expr(rng);
    EXPECT_EQ(hbar_coefficient(f, g, 0), mul(f, g));
    EXPECT_LE(coefficient_distance(hbar_coefficient(f, g, 1), scale(poisson_bracket(f, g), kI)), 1e-13);
  }
}

TEST(HbarCoefficient, ExponentialTaylorCoefficients) {
  const Complex a1{1.0, 0.2}, b1{0.3, 0.0}, a2{-0.4, 0.1}, b2{0.0, 0.6};
  const StarExpr f = StarExpr::exponential(1.0, a1, b1), g = StarExpr::exponential(1.0, a2, b2);
  const Complex y = -kI * (a1 * b2 - b1 * a2);
  Complex w{1.0, 0.0};
  for (int k = 0; k <= 10; ++k) {
    if (k > 0) w *= y / static_cast<double>(k);
    EXPECT_LE(coefficient_distance(hbar_coefficient(f, g, k), scale(mul(f, g), w)), 1e-13) << "k=" << k;
  }
}

TEST(Poisson, Examples) {
  EXPECT_EQ(poisson_bracket(StarExpr::z(), StarExpr::zbar()), StarExpr::constant(1.0));
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const StarExpr f = rand_expr(rng);
    EXPECT_TRUE(poisson_bracket(f, f).is_zero());
    const StarExpr g = rand_expr(rng);
    EXPECT_LE(coefficient_distance(poisson_bracket(f, g), neg(poisson_bracket(g, f))), 1e-14);
  }
}

TEST(Poisson, AlignedExponentialsVanish) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 50; ++t) {
    const Complex mu = rand_disc(rng, 0.95);
    const Complex a1 = rand_nonzero(rng, 1.0, 0.1), a2 = rand_nonzero(rng, 1.0, 0.1);
    const StarExpr f = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a1, mu * a1);
    const StarExpr g = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a2, mu * a2);
    EXPECT_TRUE(poisson_bracket(f, g).is_zero());
  }
}

TEST(StarN, TriplePhaseAndEdgeCases) {
  const std::array<Complex, 3> a{Complex{1.0, 0.0}, {0.5, -0.2}, {-0.7, 0.3}};
  const std::array<Complex, 3> b{Complex{0.2, 0.1}, {-0.4, 0.0}, {0.1, 0.6}};
  const double hbar = 0.9;
  std::vector<StarExpr> fs;
  for (int j = 0; j < 3; ++j) fs.push_back(StarExpr::exponential(1.0, a[j], b[j]));
  const Complex k = (a[0] * b[1] - b[0] * a[1]) + (a[1] * b[2] - b[1] * a[2]) + (a[0] * b[2] - b[0] * a[2]);
  const StarExpr expected = scale(mul(mul(fs[0], fs[1]), fs[2]), std::exp(-kI * hbar * k));
  EXPECT_LE(coefficient_distance(star_n(fs, StarConfig{hbar, std::nullopt}), expected), 1e-12);

  const std::vector<StarExpr> one{fs[1]};
  EXPECT_EQ(star_n(one, StarConfig{hbar, std::nullopt}), fs[1]);
  EXPECT_THROW((void)star_n(std::vector<StarExpr>{}, StarConfig{}), std::invalid_argument);
}

}  // namespace
