#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mwqc/term_algebra.hpp"
#include "support/oracles.hpp"

namespace {

using namespace mwqc;
using namespace mwqc::testing;

const StarExpr kZ = StarExpr::z();
const StarExpr kZbar = StarExpr::zbar();

TEST(Canonicalize, MergesEqualKeys) {
  const StarExpr f = StarExpr::canonicalize({Term{1.0, 1, 0}, Term{2.0, 1, 0}});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.terms()[0].coeff, Complex(3.0));
  EXPECT_EQ(f, StarExpr::monomial(3.0, 1, 0));
}

TEST(Canonicalize, CancellationGivesZero) {
  const StarExpr f = StarExpr::canonicalize({Term{1.0, 1, 0}, Term{-1.0, 1, 0}});
  EXPECT_TRUE(f.is_zero());
  EXPECT_EQ(f, StarExpr{});
}

TEST(Canonicalize, DistinctKeysKeepCanonicalOrder) {
  const Term e{1.0, 0, 0, 1.0, 0.0};
  const Term ze{1.0, 1, 0, 1.0, 0.0};
  const StarExpr a = StarExpr::canonicalize({ze, e});
  const StarExpr b = StarExpr::canonicalize({e, ze});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.terms()[0].pow_z, 0);
  EXPECT_EQ(a.terms()[1].pow_z, 1);
}

TEST(Canonicalize, NonFiniteCoefficientNamesIndex) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    (void)StarExpr::canonicalize({Term{1.0, 0, 0}, Term{1.0, 1, 0}, Term{nan, 2, 0}});
    FAIL() << "expected NonFiniteTermError";
  } catch (const NonFiniteTermError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  EXPECT_THROW((void)StarExpr::canonicalize({Term{1.0, 0, 0, {std::numeric_limits<double>::infinity(), 0.0}}}),
               NonFiniteTermError);
}

TEST(Canonicalize, DegreeLimit) {
  EXPECT_NO_THROW((void)StarExpr::monomial(1.0, 32, 32));
  EXPECT_THROW((void)StarExpr::monomial(1.0, 40, 25), DegreeOverflowError);
  EXPECT_THROW((void)mul(StarExpr::monomial(1.0, 40, 0), StarExpr::monomial(1.0, 0, 25)), DegreeOverflowError);
}

TEST(Canonicalize, FrequencyMergeTolerance) {
  const StarExpr close = StarExpr::canonicalize({Term{1.0, 0, 0, 1.0, 0.0}, Term{1.0, 0, 0, 1.0 + 1e-14, 0.0}});
  EXPECT_EQ(close.size(), 1u);
  const StarExpr apart = StarExpr::canonicalize({Term{1.0, 0, 0, 1.0, 0.0}, Term{1.0, 0, 0, 1.0 + 1e-9, 0.0}});
  EXPECT_EQ(apart.size(), 2u);
}

TEST(Canonicalize, PrunesRelativeToLargestCoefficient) {
  const StarExpr f = StarExpr::canonicalize({Term{1.0, 0, 0}, Term{1e-16, 1, 0}});
  EXPECT_EQ(f, StarExpr::constant(1.0));
  const StarExpr g = StarExpr::canonicalize({Term{1e-16, 1, 0}});
  EXPECT_EQ(g.size(), 1u);  // nothing larger to compare against
}

TEST(Canonicalize, Idempotent) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<Term> raw;
    for (int k = 0; k < 6; ++k) raw.push_back(rand_term(rng, 3, 1.0, true));
    const StarExpr once = StarExpr::canonicalize(raw);
    const StarExpr twice = StarExpr::canonicalize({once.terms().begin(), once.terms().end()});
    EXPECT_EQ(once, twice);
  }
}

TEST(Mul, Examples) {
  EXPECT_EQ(mul(kZ, kZbar), StarExpr::monomial(1.0, 1, 1));
  const StarExpr e = mul(StarExpr::exponential(1.0, 0.5, 0.0), StarExpr::exponential(1.0, 1.5, 0.0));
  EXPECT_EQ(e, StarExpr::exponential(1.0, 2.0, 0.0));
  const StarExpr f = StarExpr::affine(1.0, 2.0, 3.0);
  EXPECT_EQ(add(f, StarExpr{}), f);
}

TEST(Mul, RingLaws) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const StarExpr f = rand_expr(rng, 3, 2, 1.0, true);
    const StarExpr g = rand_expr(rng, 3, 2, 1.0, true);
    const StarExpr h = rand_expr(rng, 3, 2, 1.0, true);
    EXPECT_LE(coefficient_distance(add(f, g), add(g, f)), 1e-14);
    EXPECT_LE(coefficient_distance(mul(f, g), mul(g, f)), 1e-14);
    EXPECT_LE(coefficient_distance(add(add(f, g), h), add(f, add(g, h))), 1e-14);
    EXPECT_LE(coefficient_distance(mul(mul(f, g), h), mul(f, mul(g, h))), 1e-13);
    EXPECT_LE(coefficient_distance(mul(f, add(g, h)), add(mul(f, g), mul(f, h))), 1e-13);
    EXPECT_TRUE(sub(f, f).is_zero());
  }
}

TEST(Mul, PowerMatchesRepeatedProduct) {
  const StarExpr f = StarExpr::affine(1.0, 0.5, 2.0);
  EXPECT_EQ(power(f, 0), StarExpr::constant(1.0));
  EXPECT_LE(coefficient_distance(power(f, 5), mul(mul(mul(mul(f, f), f), f), f)), 1e-14);
}

TEST(Conj, Examples) {
  EXPECT_EQ(conj(kZ), kZbar);
  EXPECT_EQ(conj(StarExpr::exponential(1.0, 0.7, 0.0)), StarExpr::exponential(1.0, 0.0, -0.7));
}

TEST(Conj, InvolutionAndMultiplicative) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const StarExpr f = rand_expr(rng);
    const StarExpr g = rand_expr(rng);
    EXPECT_EQ(conj(conj(f)), f);
    EXPECT_LE(coefficient_distance(conj(mul(f, g)), mul(conj(f), conj(g))), 1e-14);
    const Complex w = rand_box(rng, 1.0);
    EXPECT_LE(rel_err(eval(conj(f), w), std::conj(eval(f, w))), 1e-13);
  }
}

TEST(Derivatives, Examples) {
  const Complex a{2.0, -1.0}, b{0.3, 0.4}, c{5.0, 0.0};
  EXPECT_EQ(d_z(StarExpr::affine(a, b, c)), StarExpr::constant(a));
  EXPECT_EQ(d_zbar(StarExpr::affine(a, b, c)), StarExpr::constant(b));
  EXPECT_TRUE(d_zbar(StarExpr::exponential(1.0, 1.3, 0.0)).is_zero());
  const Complex alpha{0.8, 0.1}, beta{-0.2, 0.5};
  const StarExpr e = StarExpr::exponential(1.0, alpha, beta);
  EXPECT_LE(coefficient_distance(d_z(e), scale(e, kI * alpha)), 1e-15);
  EXPECT_EQ(d_x(kZ), StarExpr::constant(1.0));
  EXPECT_EQ(d_y(kZ), StarExpr::constant(kI));
  EXPECT_EQ(d_x(kZbar), StarExpr::constant(1.0));
  EXPECT_EQ(d_y(kZbar), StarExpr::constant(-kI));
}

TEST(Derivatives, ExponentialAgainstFiniteDifferences) {
  const StarExpr e = StarExpr::exponential(1.0, {0.8, 0.1}, {-0.2, 0.5});
  for (double x = -1.0; x <= 1.0; x += 0.25) {
    for (double y = -1.0; y <= 1.0; y += 0.25) {
      const Complex w{x, y};
      EXPECT_LE(rel_err(eval(d_z(e), w), fd_dz(e, w)), 1e-9);
      EXPECT_LE(rel_err(eval(d_zbar(e), w), fd_dzbar(e, w)), 1e-9);
    }
  }
}

TEST(Derivatives, LeibnizAndCommutation) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const StarExpr f = rand_expr(rng);
    const StarExpr g = rand_expr(rng);
    EXPECT_LE(coefficient_distance(d_z(mul(f, g)), add(mul(d_z(f), g), mul(f, d_z(g)))), 1e-13);
    EXPECT_LE(coefficient_distance(d_zbar(mul(f, g)), add(mul(d_zbar(f), g), mul(f, d_zbar(g)))), 1e-13);
    EXPECT_LE(coefficient_distance(d_z(d_zbar(f)), d_zbar(d_z(f))), 1e-14);
  }
}

// 50 random expressions, central differences with step 1e-4. Errors are
// relative to the derivative scale of each expression over its sample points.
TEST(Derivatives, SymbolicMatchesNumeric) {
  std::mt19937_64 rng(5);
  const double h = 1e-4;
  for (int t = 0; t < 50; ++t) {
    const StarExpr f = rand_expr(rng, 3, 2, 1.0);
    const StarExpr fz = d_z(f), fzbar = d_zbar(f);
    double scale_ref = 0.0, worst = 0.0;
    for (int s = 0; s < 16; ++s) {
      const Complex w = rand_box(rng, 1.0);
      const Complex dx = (eval(f, w + h) - eval(f, w - h)) / (2 * h);
      const Complex dy = (eval(f, w + kI * h) - eval(f, w - kI * h)) / (2 * h);
      const Complex ez = eval(fz, w), ezbar = eval(fzbar, w);
      scale_ref = std::max({scale_ref, std::abs(ez), std::abs(ezbar)});
      worst = std::max({worst, std::abs(0.5 * (dx - kI * dy) - ez), std::abs(0.5 * (dx + kI * dy) - ezbar)});
    }
    EXPECT_LE(worst / scale_ref, 1e-6);
  }
}

TEST(Eval, Examples) {
  EXPECT_LE(std::abs(eval(add(kZ, kZbar), {1.0, 1.0}) - Complex(2.0)), 1e-15);
  EXPECT_EQ(eval(StarExpr::exponential(1.0, 1.0, 0.0), 0.0), Complex(1.0));
  EXPECT_EQ(eval(StarExpr{}, {3.0, 4.0}), Complex(0.0));
}

TEST(Eval, OverflowReportsDominatingTerm) {
  const StarExpr f = add(kZ, StarExpr::exponential(1.0, {0.0, -1.0}, 0.0));  // exp(z)
  try {
    (void)eval(f, 1000.0);
    FAIL() << "expected EvalOverflowError";
  } catch (const EvalOverflowError& e) {
    EXPECT_EQ(e.term().freq_z, Complex(0.0, -1.0));
  }
}

TEST(Eval, RingHomomorphism) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const StarExpr f = rand_expr(rng);
    const StarExpr g = rand_expr(rng);
    const Complex w = rand_box(rng, 1.5);
    EXPECT_LE(rel_err(eval(mul(f, g), w), eval(f, w) * eval(g, w)), 1e-12);
    EXPECT_LE(rel_err(eval(add(f, g), w), eval(f, w) + eval(g, w)), 1e-12);
  }
}

TEST(Distance, MatchedAndUnmatchedTerms) {
  const StarExpr f = StarExpr::affine(1.0, 2.0, 0.0);
  EXPECT_EQ(coefficient_distance(f, f), 0.0);
  EXPECT_DOUBLE_EQ(coefficient_distance(f, StarExpr::affine(1.0, 1.0, 0.0)), 0.5);
  EXPECT_DOUBLE_EQ(coefficient_distance(f, StarExpr::affine(1.0, 2.0, 4.0)), 1.0);
  EXPECT_EQ(coefficient_distance(StarExpr{}, StarExpr{}), 0.0);
}

}  // namespace
