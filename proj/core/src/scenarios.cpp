#include "mwqc/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mwqc/beltrami.hpp"
#include "mwqc/cauchy_numeric.hpp"
#include "mwqc/expr_parser.hpp"
#include "mwqc/star_engine.hpp"

namespace mwqc::verify {

namespace {

// ---------------------------------------------------------------------------
// Parameter plumbing

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_integer(const std::string& s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Complex> to_complex(const std::string& s) {
  try {
    return parse_constant(s);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::string_view kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::real:
      return "real";
    case ParamKind::integer:
      return "integer";
    case ParamKind::complex:
      return "complex";
  }
  return "?";
}

ParamSpec real_param(std::string name, double value, std::string help) {
  return {std::move(name), ParamKind::real, format_number(value), std::move(help)};
}
ParamSpec int_param(std::string name, std::int64_t value, std::string help) {
  return {std::move(name), ParamKind::integer, std::to_string(value), std::move(help)};
}
ParamSpec complex_param(std::string name, std::string value, std::string help) {
  return {std::move(name), ParamKind::complex, std::move(value), std::move(help)};
}

std::vector<ParamSpec> full_specs(const Scenario& s) {
  std::vector<ParamSpec> specs = s.params;
  specs.push_back(int_param("seed", static_cast<std::int64_t>(default_seed()), "random seed"));
  specs.push_back(real_param("tol", s.tolerance, "acceptance tolerance"));
  return specs;
}

bool declares(const std::vector<ParamSpec>& specs, const std::string& name) {
  return std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& p) { return p.name == name; });
}

// ---------------------------------------------------------------------------
// Random draws

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex rand_box(std::mt19937_64& rng, double r) { return {uniform(rng, -r, r), uniform(rng, -r, r)}; }

Complex rand_nonzero(std::mt19937_64& rng, double r, double min_abs) {
  Complex c;
  do {
    c = rand_box(rng, r);
  } while (std::abs(c) < min_abs);
  return c;
}

Complex rand_disc(std::mt19937_64& rng, double rmax) {
  const double rad = rmax * std::sqrt(uniform(rng, 0.0, 1.0));
  return std::polar(rad, uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

int rand_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

StarExpr rand_monomial_exponential(std::mt19937_64& rng, int max_pow, double freq_radius) {
  return StarExpr::term(Term{rand_nonzero(rng, 1.0, 0.1), rand_int(rng, 0, max_pow), rand_int(rng, 0, max_pow),
                             rand_box(rng, freq_radius), rand_box(rng, freq_radius)});
}

Complex coefficient_of(const StarExpr& f, const Term& key) {
  for (const Term& t : f.terms()) {
    if (same_key(t, key)) return t.coeff;
  }
  return {};
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::string fmt(Complex c) { return format_complex(c); }

// ---------------------------------------------------------------------------
// Scenario bodies

void affine_star(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const double range = p.real("hbar_range");
  const auto trials = p.integer("trials");

  double worst = 0.0;
  double worst_mu = 0.0;
  std::int64_t worst_trial = -1;
  for (std::int64_t t = 0; t < trials; ++t) {
    const Complex a1 = rand_nonzero(rng, 1.0, 0.1), b1 = rand_box(rng, 1.0), c1 = rand_box(rng, 1.0);
    const Complex a2 = rand_nonzero(rng, 1.0, 0.1), b2 = rand_box(rng, 1.0), c2 = rand_box(rng, 1.0);
    const double hbar = uniform(rng, -range, range);
    const StarExpr f1 = StarExpr::affine(a1, b1, c1);
    const StarExpr f2 = StarExpr::affine(a2, b2, c2);
    const StarExpr product = star(f1, f2, hbar);
    const StarExpr closed = add(mul(f1, f2), StarExpr::constant(kI * hbar * (a1 * b2 - b1 * a2)));
    const Complex mu1 = b1 / a1, mu2 = b2 / a2;
    const StarExpr mu_form = sub(mul(f1, f2), StarExpr::constant(kI * hbar * (mu1 - mu2) * a1 * a2));
    const double d = coefficient_distance(product, closed);
    if (d > worst) {
      worst = d;
      worst_trial = t;
    }
    worst_mu = std::max(worst_mu, coefficient_distance(product, mu_form));
  }

  const StarExpr f = StarExpr::affine(2.0, 1.0, 0.0);
  const StarExpr g = StarExpr::affine(3.0, -1.0, 0.0);
  const StarExpr example = star(f, g, 1.0);
  const double example_distance =
      coefficient_distance(example, sub(mul(f, g), StarExpr::constant(Complex{0.0, 5.0})));
  ctx.witness("example", "(2*z + zbar) * (3*z - zbar) at hbar=1 -> " + serialize(example));

  const bool ok = ctx.check("closed_form_distance", worst, tol);
  ctx.check("mu_form_distance", worst_mu, tol);
  ctx.check("example_distance", example_distance, tol);
  if (!ok) ctx.witness("worst_trial", std::to_string(worst_trial));
}

void exp_phase(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const double range = p.real("hbar_range");
  const auto trials = p.integer("trials");
  const auto order = static_cast<int>(p.integer("order"));

  const Complex a1 = p.complex("alpha1"), b1 = p.complex("beta1");
  const Complex a2 = p.complex("alpha2"), b2 = p.complex("beta2");
  const double hbar = p.real("hbar");
  const StarExpr f1 = StarExpr::exponential(1.0, a1, b1);
  const StarExpr f2 = StarExpr::exponential(1.0, a2, b2);
  const Complex phase = std::exp(-kI * hbar * symplectic_pairing(a1, b1, a2, b2));
  const StarExpr fixed = star(f1, f2, hbar);
  ctx.check("fixed_distance", coefficient_distance(fixed, scale(mul(f1, f2), phase)), tol);
  ctx.witness("fixed_phase", fmt(phase));
  ctx.check("order0_distance", coefficient_distance(star_truncated(f1, f2, hbar, 0), mul(f1, f2)), tol);
  ctx.check("order1_distance",
            coefficient_distance(star_truncated(f1, f2, hbar, 1),
                                 add(mul(f1, f2), scale(poisson_bracket(f1, f2), kI * hbar))),
            tol);

  double worst = 0.0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < trials; ++t) {
    const Complex x1 = rand_box(rng, 1.0), y1 = rand_box(rng, 1.0);
    const Complex x2 = rand_box(rng, 1.0), y2 = rand_box(rng, 1.0);
    const double h = uniform(rng, -range, range);
    const StarExpr g1 = StarExpr::exponential(1.0, x1, y1);
    const StarExpr g2 = StarExpr::exponential(1.0, x2, y2);
    const Complex exponent = -kI * h * symplectic_pairing(x1, y1, x2, y2);
    const StarExpr exact = star(g1, g2, h);
    worst = std::max(worst, coefficient_distance(exact, scale(mul(g1, g2), std::exp(exponent))));

    // Taylor remainder of exp(x): |R_N| <= |x|^{N+1}/(N+1)! * exp(max(0, Re x)).
    const Term key{1.0, 0, 0, x1 + x2, y1 + y2};
    const double floor = 1e-13 * std::exp(std::abs(exponent));
    double power_over_factorial = 1.0;
    for (int n = 0; n <= order; ++n) {
      power_over_factorial *= std::abs(exponent) / (n + 1);
      const double bound = power_over_factorial * std::exp(std::max(0.0, exponent.real()));
      const double actual = std::abs(coefficient_of(star_truncated(g1, g2, h, n), key) - std::exp(exponent));
      worst_excess = std::max(worst_excess, actual - bound - floor);
    }
  }
  ctx.check("random_distance", worst, tol);
  ctx.check("remainder_excess", std::max(worst_excess, 0.0), 0.0);
}

void hbar_series(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const double range = p.real("hbar_range");
  const auto trials = p.integer("trials");
  const auto max_k = static_cast<int>(p.integer("max_k"));

  double d0 = 0.0, d1 = 0.0, dpartial = 0.0, dconverge = 0.0, dexp = 0.0, daffine = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const StarExpr f = add(rand_monomial_exponential(rng, 2, 0.7), rand_monomial_exponential(rng, 1, 0.7));
    const StarExpr g = add(rand_monomial_exponential(rng, 2, 0.7), rand_monomial_exponential(rng, 1, 0.7));
    const double h = uniform(rng, -range, range);

    d0 = std::max(d0, coefficient_distance(hbar_coefficient(f, g, 0), mul(f, g)));
    d1 = std::max(d1, coefficient_distance(hbar_coefficient(f, g, 1), scale(poisson_bracket(f, g), kI)));

    StarExpr partial;
    Complex hk{1.0, 0.0};
    for (int k = 0; k <= max_k; ++k) {
      partial = add(partial, scale(hbar_coefficient(f, g, k), hk));
      hk *= h;
      dpartial = std::max(dpartial, coefficient_distance(partial, star_truncated(f, g, h, k)));
    }
    dconverge = std::max(dconverge, coefficient_distance(star_truncated(f, g, h, 40), star(f, g, h)));

    const Complex a1 = rand_box(rng, 1.0), b1 = rand_box(rng, 1.0);
    const Complex a2 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0);
    const StarExpr e1 = StarExpr::exponential(1.0, a1, b1);
    const StarExpr e2 = StarExpr::exponential(1.0, a2, b2);
    const Complex minus_i_kappa = -kI * symplectic_pairing(a1, b1, a2, b2);
    Complex weight{1.0, 0.0};
    for (int k = 0; k <= max_k; ++k) {
      if (k > 0) weight *= minus_i_kappa / static_cast<double>(k);
      dexp = std::max(dexp, coefficient_distance(hbar_coefficient(e1, e2, k), scale(mul(e1, e2), weight)));
    }

    const StarExpr l1 = StarExpr::affine(rand_box(rng, 1.0), rand_box(rng, 1.0), rand_box(rng, 1.0));
    const StarExpr l2 = StarExpr::affine(rand_box(rng, 1.0), rand_box(rng, 1.0), rand_box(rng, 1.0));
    daffine = std::max(daffine, coefficient_distance(star_truncated(l1, l2, h, 1), star(l1, l2, h)));
  }
  ctx.check("order0_distance", d0, tol);
  ctx.check("order1_poisson_distance", d1, tol);
  ctx.check("partial_sum_distance", dpartial, tol);
  ctx.check("high_order_convergence", dconverge, tol);
  ctx.check("exponential_coefficient_distance", dexp, tol);
  ctx.check("affine_termination_distance", daffine, tol);
}

void mu_composite(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const auto trials = p.integer("trials");
  const auto grid = static_cast<int>(p.integer("grid"));
  constexpr std::array<double, 4> kHbars{0.0, 0.5, 1.0, 2.0};

  double formula = 0.0, drift = 0.0, beltrami = 0.0, pointwise = 0.0;
  std::size_t unrecognised = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Complex a1, a2;
    do {
      a1 = rand_nonzero(rng, 1.0, 0.2);
      a2 = rand_nonzero(rng, 1.0, 0.2);
    } while (std::abs(a1 + a2) < 0.2);
    const Complex b1 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0);
    const StarExpr f1 = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a1, b1);
    const StarExpr f2 = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a2, b2);
    const Complex expected = (b1 + b2) / (a1 + a2);

    std::optional<Complex> mu_at_zero;
    for (const double h : kHbars) {
      const StarExpr product = star(f1, f2, h);
      const auto mu = mu_exact(product);
      if (!mu) {
        ++unrecognised;
        continue;
      }
      formula = std::max(formula, rel(mu->value, expected));
      if (!mu_at_zero) mu_at_zero = mu->value;
      drift = std::max(drift, rel(mu->value, *mu_at_zero));

      const StarExpr fz = d_z(product), fzbar = d_zbar(product);
      for (int s = 0; s < 4; ++s) {
        const Complex w = rand_box(rng, 1.0);
        const Complex lhs = eval(fzbar, w);
        const Complex rhs = mu->value * eval(fz, w);
        beltrami = std::max(beltrami, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
      }
      if (t < 5 && h == 1.0) {
        const BeltramiValue field = mu_grid(product, GridDomain{-1.0, 1.0, -1.0, 1.0, grid, grid});
        for (std::size_t k = 0; k < field.field.values.size(); ++k) {
          if (!field.field.masked[k]) pointwise = std::max(pointwise, rel(field.field.values[k], mu->value));
        }
      }
    }
  }
  ctx.check_count("unrecognised_products", unrecognised, static_cast<std::size_t>(trials) * kHbars.size());
  ctx.check("formula_error", formula, tol);
  ctx.check("hbar_drift", drift, tol);
  ctx.check("beltrami_residual", beltrami, tol);
  ctx.check("grid_vs_exact", pointwise, tol);
}

void associativity(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const double phase_tol = p.real("phase_tol");
  const double range = p.real("hbar_range");
  const auto trials = p.integer("trials");

  std::size_t failed = 0;
  double worst = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const StarExpr f = rand_monomial_exponential(rng, 2, 1.0);
    const StarExpr g = rand_monomial_exponential(rng, 2, 1.0);
    const StarExpr h = rand_monomial_exponential(rng, 2, 1.0);
    const double hb = uniform(rng, -range, range);
    const double d = coefficient_distance(star(star(f, g, hb), h, hb), star(f, star(g, h, hb), hb));
    worst = std::max(worst, d);
    if (!(d <= tol)) ++failed;
  }
  ctx.residual("max_distance", worst);
  ctx.witness("passed_triples", std::to_string(trials - static_cast<std::int64_t>(failed)) + "/" +
                                    std::to_string(trials));
  ctx.check_count("failed_triples", failed, static_cast<std::size_t>(trials));

  double phase_err = 0.0, normal_order_err = 0.0, order_mismatch = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::array<Complex, 3> a{}, b{};
    std::array<StarExpr, 3> fs;
    for (int j = 0; j < 3; ++j) {
      a[j] = rand_nonzero(rng, 1.0, 0.2);
      b[j] = rand_box(rng, 1.0);
      fs[j] = StarExpr::exponential(1.0, a[j], b[j]);
    }
    const double hb = uniform(rng, -range, range);
    const StarConfig cfg{hb, std::nullopt};
    const Complex k12 = symplectic_pairing(a[0], b[0], a[1], b[1]);
    const Complex k23 = symplectic_pairing(a[1], b[1], a[2], b[2]);
    const Complex k13 = symplectic_pairing(a[0], b[0], a[2], b[2]);
    const StarExpr pointwise = mul(mul(fs[0], fs[1]), fs[2]);
    const StarExpr triple = star_n(fs, cfg);
    phase_err = std::max(phase_err,
                         coefficient_distance(triple, scale(pointwise, std::exp(-kI * hb * (k12 + k23 + k13)))));

    // Normal-ordered form in the Beltrami coefficients.
    const Complex z0 = rand_box(rng, 0.5);
    const MuFunction mf({a[0], a[1], a[2]}, z0, hb);
    const std::array<Complex, 3> mus{b[0] / a[0], b[1] / a[1], b[2] / a[2]};
    normal_order_err = std::max(normal_order_err, rel(eval(triple, z0), mf.closed_form(mus)));

    // f2*f3*f1 carries exp(-i hbar (k23 + k31 + k21)); compare the predicted gap.
    const std::array<StarExpr, 3> rotated{fs[1], fs[2], fs[0]};
    const Complex e1 = std::exp(-kI * hb * (k12 + k23 + k13));
    const Complex e2 = std::exp(-kI * hb * (k23 - k13 - k12));
    const double predicted = std::abs(e1 - e2) / std::max(std::abs(e1), std::abs(e2));
    order_mismatch = std::max(order_mismatch,
                              std::abs(coefficient_distance(triple, star_n(rotated, cfg)) - predicted));
  }
  ctx.check("triple_phase_distance", phase_err, phase_tol);
  ctx.check("normal_order_distance", normal_order_err, phase_tol);
  ctx.check("noncommutativity_mismatch", order_mismatch, 1e-9);
}

void poisson_vanishing(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const auto trials = p.integer("trials");

  std::size_t mismatches = 0, not_vanishing = 0;
  double mu_form = 0.0, first_order = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const int mode = static_cast<int>(t % 3);  // 0 aligned, 1 misaligned, 2 aligned by transform_mu
    const bool exponential = (t / 3) % 2 == 0;
    const Complex mu1 = rand_disc(rng, 0.9);
    Complex mu2 = mu1;
    if (mode != 0) {
      do {
        mu2 = rand_disc(rng, 0.9);
      } while (std::abs(mu2 - mu1) < 0.05 || std::abs(mu2) < 0.05 || std::abs(mu1) < 0.05);
    }
    const Complex a1 = rand_nonzero(rng, 1.0, 0.2), a2 = rand_nonzero(rng, 1.0, 0.2);
    StarExpr f1, f2;
    if (exponential) {
      f1 = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a1, mu1 * a1);
      f2 = StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), a2, mu2 * a2);
    } else {
      f1 = StarExpr::affine(a1, mu1 * a1, rand_box(rng, 1.0));
      f2 = StarExpr::affine(a2, mu2 * a2, rand_box(rng, 1.0));
    }
    if (mode == 2) f1 = align_mu(f1, mu2);
    const bool aligned = mode != 1;

    const StarExpr bracket = poisson_bracket(f1, f2);
    if (bracket.is_zero() != aligned) {
      ++mismatches;
      ctx.witness("mismatch_trial_" + std::to_string(t), serialize(f1) + " | " + serialize(f2));
    }
    const double hb = uniform(rng, -2.0, 2.0);
    if (aligned && !approx_equal(star(f1, f2, hb), mul(f1, f2), tol)) ++not_vanishing;

    if (!aligned) {
      const Complex m1 = mu_exact(f1)->value, m2 = mu_exact(f2)->value;
      const StarExpr predicted = scale(mul(d_z(f1), d_z(f2)), m2 - m1);
      mu_form = std::max(mu_form, coefficient_distance(bracket, predicted));
      if (exponential) {
        const StarExpr f_one = scale(mul(f1, f2), kI * (m1 - m2) * a1 * a2);
        first_order = std::max(first_order, coefficient_distance(hbar_coefficient(f1, f2, 1), f_one));
      }
    }
  }
  ctx.check_count("vanishing_mismatches", mismatches, static_cast<std::size_t>(trials));
  ctx.check_count("star_differs_from_product", not_vanishing, static_cast<std::size_t>(trials));
  ctx.check("mu_form_distance", mu_form, tol);
  ctx.check("first_order_distance", first_order, tol);
}

void qc_classification(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const auto cases = p.integer("cases");
  const auto grid = static_cast<int>(p.integer("grid"));
  const double k_threshold = p.real("k_threshold");
  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, grid, grid};

  std::size_t disagreements = 0;
  double k_error = 0.0;
  for (std::int64_t c = 0; c < cases; ++c) {
    StarExpr f;
    double modulus = 0.0;
    bool expected = false;
    if (c == 0) {
      f = StarExpr::zbar();
      modulus = std::numeric_limits<double>::infinity();
    } else if (c == 1) {
      f = StarExpr::z();
    } else if (c == 2) {
      f = StarExpr::affine(1.0, 1.0, 0.0);
      modulus = 1.0;
    } else {
      modulus = c % 2 == 0 ? uniform(rng, 0.0, 0.95) : uniform(rng, 1.05, 2.0);
      const Complex mu = std::polar(modulus, uniform(rng, 0.0, 2.0 * std::numbers::pi));
      const Complex lead = rand_nonzero(rng, 1.0, 0.3);
      f = (c / 2) % 2 == 0 ? StarExpr::affine(lead, mu * lead, rand_box(rng, 1.0))
                           : StarExpr::exponential(rand_nonzero(rng, 1.0, 0.1), lead, mu * lead);
    }
    expected = modulus < 1.0;

    const QCReport r = qc_certify(f, dom, k_threshold);
    if (r.verdict != expected) {
      ++disagreements;
      ctx.witness("case_" + std::to_string(c), serialize(f) + " k_hat=" + format_number(r.k_hat));
    }
    if (std::isfinite(modulus)) k_error = std::max(k_error, std::abs(r.k_hat - modulus) / std::max(1.0, modulus));
    if (c == 0 && r.dz_nonvanishing) {
      ++disagreements;
      ctx.witness("zbar_condition", "d_z f reported nonvanishing");
    }
  }
  ctx.check_count("disagreements", disagreements, static_cast<std::size_t>(cases));
  ctx.check("k_hat_error", k_error, tol);
}

void conformal_invariance(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  const double tol = p.real("tol");
  const auto n = static_cast<int>(p.integer("grid"));

  struct Family {
    const char* name;
    StarExpr f;
  };
  const std::array<Family, 2> families{Family{"affine", StarExpr::affine(1.0, 0.4, 0.2)},
                                       Family{"exponential", StarExpr::exponential(1.0, 1.0, 0.25)}};
  struct Case {
    const char* name;
    ConformalMap phi;
    GridDomain dom;
  };
  const std::array<Case, 6> maps{
      Case{"identity", ConformalMap::identity(), {-1.0, 1.0, -1.0, 1.0, n, n}},
      Case{"translation", ConformalMap::translation({0.5, -0.3}), {-1.0, 1.0, -1.0, 1.0, n, n}},
      Case{"scaling", ConformalMap::affine(2.0, 1.0), {-1.0, 1.0, -1.0, 1.0, n, n}},
      Case{"rotation-scaling", ConformalMap::scaling(std::polar(0.8, 0.3)), {-1.0, 1.0, -1.0, 1.0, n, n}},
      Case{"mobius", ConformalMap::mobius(1.0, -kI, 1.0, kI), {-1.0, 1.0, 0.1, 2.1, n, n}},
      Case{"exp-strip", ConformalMap::exponential(), {-1.0, 1.0, -1.0, 1.0, n, n}},
  };
  for (const Family& fam : families) {
    for (const Case& c : maps) {
      ctx.check(std::string(fam.name) + "/" + c.name, conformal_pullback_check(fam.f, c.phi, c.dom), tol);
    }
  }
}

struct CauchyChecks {
  double reproduce = 0.0;
  double derivative = 0.0;
  double independence = 0.0;
};

CauchyChecks cauchy_case(const MuFunction& mf, const std::vector<Complex>& mus, int nodes,
                         const std::vector<std::vector<int>>& orders) {
  CauchyChecks out;
  const Complex direct = mu_function_eval(mf, mus);
  const auto contours = default_contours(mus, nodes);
  const Complex reproduced = cauchy_reproduce(mf, mus, contours);
  out.reproduce = rel(reproduced, direct);

  auto wider = contours;
  for (ContourSpec& c : wider) c.radius *= 1.5;
  out.independence = rel(cauchy_reproduce(mf, mus, wider), reproduced);

  for (const auto& ord : orders) {
    const Complex analytic = analytic_derivative(mf, mus, ord);
    out.derivative = std::max(out.derivative, rel(cauchy_derivative(mf, mus, ord, contours), analytic));
  }
  return out;
}

void cauchy_2var(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const auto nodes = static_cast<int>(p.integer("nodes"));
  const auto trials = p.integer("trials");

  const MuFunction mf({p.complex("alpha1"), p.complex("alpha2")}, p.complex("z0"), p.real("hbar"));
  const std::vector<Complex> mus{p.complex("mu1"), p.complex("mu2")};
  const std::vector<std::vector<int>> orders{{1, 0}, {0, 1}, {1, 1}, {2, 1}};
  CauchyChecks fixed = cauchy_case(mf, mus, nodes, orders);
  ctx.witness("direct_value", fmt(mu_function_eval(mf, mus)));

  // d F / d mu_1 by central differences of the star-product route.
  const double h = 1e-5;
  const Complex fd = (mu_function_eval(mf, std::vector<Complex>{mus[0] + h, mus[1]}) -
                      mu_function_eval(mf, std::vector<Complex>{mus[0] - h, mus[1]})) /
                     (2.0 * h);
  const std::array<int, 2> d10{1, 0};
  const double fd_error = rel(cauchy_derivative(mf, mus, d10, default_contours(mus, nodes)), fd);

  // Coarser and finer node counts: the error must not grow as nodes double.
  const Complex direct = mu_function_eval(mf, mus);
  const double coarse = rel(cauchy_reproduce(mf, mus, default_contours(mus, 16)), direct);
  const double medium = rel(cauchy_reproduce(mf, mus, default_contours(mus, 32)), direct);
  const double fine = rel(cauchy_reproduce(mf, mus, default_contours(mus, 64)), direct);
  const double monotone_violation = std::max({medium - coarse, fine - medium, fixed.reproduce - fine, 0.0});

  // Equal coefficients remove the hbar phase: F(mu, mu) = f1 f2 at z0.
  const std::vector<Complex> equal{mus[0], mus[0]};
  const StarExpr pointwise = mul(StarExpr::exponential(1.0, mf.alphas()[0], mus[0] * mf.alphas()[0]),
                                 StarExpr::exponential(1.0, mf.alphas()[1], mus[0] * mf.alphas()[1]));
  const double equal_mu = rel(mu_function_eval(mf, equal), eval(pointwise, mf.z0()));

  for (std::int64_t t = 0; t < trials; ++t) {
    const MuFunction rf({rand_nonzero(rng, 1.0, 0.3), rand_nonzero(rng, 1.0, 0.3)}, rand_box(rng, 0.5),
                        uniform(rng, -1.0, 1.0));
    const std::vector<Complex> rm{rand_disc(rng, 0.95), rand_disc(rng, 0.95)};
    const CauchyChecks c = cauchy_case(rf, rm, nodes, {{1, 0}, {1, 1}});
    fixed.reproduce = std::max(fixed.reproduce, c.reproduce);
    fixed.derivative = std::max(fixed.derivative, c.derivative);
    fixed.independence = std::max(fixed.independence, c.independence);
  }
  ctx.check("reproduction_error", fixed.reproduce, tol);
  ctx.check("derivative_error", fixed.derivative, tol);
  ctx.check("contour_independence", fixed.independence, tol);
  ctx.check("finite_difference_error", fd_error, p.real("fd_tol"));
  ctx.check("node_doubling_increase", monotone_violation, 1e-12);
  ctx.check("equal_mu_phase_free", equal_mu, 1e-12);
}

void cauchy_nvar(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const auto nodes = static_cast<int>(p.integer("nodes"));
  const auto trials = p.integer("trials");

  const MuFunction mf({p.complex("alpha1"), p.complex("alpha2"), p.complex("alpha3")}, p.complex("z0"),
                      p.real("hbar"));
  const std::vector<Complex> mus{p.complex("mu1"), p.complex("mu2"), p.complex("mu3")};
  CauchyChecks all = cauchy_case(mf, mus, nodes, {{1, 0, 1}, {0, 2, 0}});
  for (std::int64_t t = 0; t < trials; ++t) {
    const MuFunction rf({rand_nonzero(rng, 1.0, 0.3), rand_nonzero(rng, 1.0, 0.3), rand_nonzero(rng, 1.0, 0.3)},
                        rand_box(rng, 0.5), uniform(rng, -1.0, 1.0));
    const std::vector<Complex> rm{rand_disc(rng, 0.95), rand_disc(rng, 0.95), rand_disc(rng, 0.95)};
    const CauchyChecks c = cauchy_case(rf, rm, nodes, {{1, 1, 1}});
    all.reproduce = std::max(all.reproduce, c.reproduce);
    all.derivative = std::max(all.derivative, c.derivative);
    all.independence = std::max(all.independence, c.independence);
  }
  ctx.check("reproduction_error", all.reproduce, tol);
  ctx.check("derivative_error", all.derivative, tol);
  ctx.check("contour_independence", all.independence, tol);
}

void cauchy_riemann(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double step = p.real("step");
  const auto trials = p.integer("trials");

  double first = 0.0, second = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::size_t n = t % 2 == 0 ? 2 : 3;
    std::vector<Complex> alphas, mus;
    for (std::size_t j = 0; j < n; ++j) {
      alphas.push_back(rand_nonzero(rng, 1.0, 0.3));
      mus.push_back(rand_disc(rng, 0.95));
    }
    const MuFunction mf(alphas, rand_box(rng, 0.5), uniform(rng, -1.0, 1.0));
    const double scale_ref = std::max(1.0, std::abs(mu_function_eval(mf, mus)));
    for (std::size_t j = 0; j < n; ++j) {
      first = std::max(first, cr_residual(mf, mus, j, step) / scale_ref);
      for (std::size_t k = 0; k < n; ++k) {
        second = std::max(second, cr_mixed_residual(mf, mus, j, k, step) / scale_ref);
      }
    }
  }
  ctx.check("first_order_residual", first, p.real("tol"));
  ctx.check("second_order_residual", second, p.real("tol2"));
}

struct LagrangianChecks {
  Complex phase;
  double symbolic = 0.0;
  double grid = 0.0;
  double closed_form = 0.0;
  double wirtinger = 0.0;
};

LagrangianChecks lagrangian_case(Complex amp, Complex alpha, Complex beta, double hbar, int grid) {
  const StarExpr phi = StarExpr::exponential(amp, alpha, beta);
  const StarExpr phi_dag = conj(phi);
  const StarExpr lag = add(mul(d_x(phi_dag), d_x(phi)), mul(d_y(phi_dag), d_y(phi)));
  const StarExpr lag_star = add(star(d_x(phi_dag), d_x(phi), hbar), star(d_y(phi_dag), d_y(phi), hbar));

  LagrangianChecks out;
  const Complex mu = beta / alpha;
  out.phase = std::exp(-kI * hbar * (1.0 - std::norm(mu)) * std::norm(alpha));
  out.symbolic = coefficient_distance(lag_star, scale(lag, out.phase));

  const StarExpr closed = StarExpr::exponential(
      std::norm(amp) * (std::norm(alpha + beta) + std::norm(alpha - beta)), alpha - std::conj(beta),
      beta - std::conj(alpha));
  out.closed_form = coefficient_distance(lag, closed);

  const GridDomain dom{-1.0, 1.0, -1.0, 1.0, grid, grid};
  const StarExpr pz = d_z(phi), pzbar = d_zbar(phi), px = d_x(phi), py = d_y(phi);
  double lag_max = 0.0, diff_max = 0.0;
  for (int iy = 0; iy < dom.ny; ++iy) {
    for (int ix = 0; ix < dom.nx; ++ix) {
      const Complex w = dom.point(ix, iy);
      const Complex l = eval(lag, w);
      lag_max = std::max(lag_max, std::abs(l));
      diff_max = std::max(diff_max, std::abs(eval(lag_star, w) - out.phase * l));
      const double lhs = 2.0 * (std::norm(eval(pz, w)) + std::norm(eval(pzbar, w)));
      const double rhs = std::norm(eval(px, w)) + std::norm(eval(py, w));
      out.wirtinger = std::max(out.wirtinger, std::abs(lhs - rhs) / std::max(lhs, 1e-300));
    }
  }
  out.grid = diff_max / lag_max;
  return out;
}

void lagrangian_phase(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const auto grid = static_cast<int>(p.integer("grid"));
  const auto trials = p.integer("trials");

  const Complex alpha = p.complex("alpha"), beta = p.complex("beta");
  const double hbar = p.real("hbar");
  LagrangianChecks all = lagrangian_case(p.complex("N"), alpha, beta, hbar, grid);
  const Complex phase_from_frequencies = std::exp(-kI * hbar * (std::norm(alpha) - std::norm(beta)));
  ctx.witness("phase", fmt(all.phase));
  const double phase_forms = std::abs(all.phase - phase_from_frequencies);

  for (std::int64_t t = 0; t < trials; ++t) {
    const Complex a = rand_nonzero(rng, 1.0, 0.2);
    const LagrangianChecks c =
        lagrangian_case(rand_nonzero(rng, 1.5, 0.1), a, rand_disc(rng, 0.95) * a, uniform(rng, -2.0, 2.0), grid);
    all.symbolic = std::max(all.symbolic, c.symbolic);
    all.grid = std::max(all.grid, c.grid);
    all.closed_form = std::max(all.closed_form, c.closed_form);
    all.wirtinger = std::max(all.wirtinger, c.wirtinger);
  }
  ctx.check("phase_forms_agree", phase_forms, tol);
  ctx.check("symbolic_distance", all.symbolic, tol);
  ctx.check("grid_relative_error", all.grid, tol);
  ctx.check("lagrangian_closed_form", all.closed_form, tol);
  ctx.check("wirtinger_identity", all.wirtinger, tol);
}

void star_conjugation(ScenarioContext& ctx) {
  const auto& p = ctx.params();
  auto& rng = ctx.rng();
  const double tol = p.real("tol");
  const double range = p.real("hbar_range");
  const auto trials = p.integer("trials");

  double conj_err = 0.0, unit_err = 0.0, commutator = 0.0, commuting = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const StarExpr f = add(rand_monomial_exponential(rng, 2, 1.0), rand_monomial_exponential(rng, 1, 1.0));
    const StarExpr g = add(rand_monomial_exponential(rng, 2, 1.0), rand_monomial_exponential(rng, 1, 1.0));
    const double h = uniform(rng, -range, range);
    conj_err = std::max(conj_err, coefficient_distance(conj(star(f, g, h)), star(conj(f), conj(g), h)));
    const StarExpr one = StarExpr::constant(1.0);
    unit_err = std::max({unit_err, coefficient_distance(star(f, one, h), f), coefficient_distance(star(one, f, h), f)});

    const Complex a1 = rand_nonzero(rng, 1.0, 0.2), a2 = rand_nonzero(rng, 1.0, 0.2);
    const Complex b1 = rand_box(rng, 1.0), b2 = rand_box(rng, 1.0);
    const StarExpr e1 = StarExpr::exponential(1.0, a1, b1);
    const StarExpr e2 = StarExpr::exponential(1.0, a2, b2);
    const Complex kappa = symplectic_pairing(a1, b1, a2, b2);
    const StarExpr moyal = sub(star(e1, e2, h), star(e2, e1, h));
    const StarExpr predicted = scale(mul(e1, e2), -2.0 * kI * std::sin(h * kappa));
    commutator = std::max(commutator, coefficient_distance(moyal, predicted) * std::max(1.0, predicted.max_abs_coeff()) /
                                          std::max(1.0, std::abs(std::exp(-kI * h * kappa))));

    // kappa = 0 when both factors share mu: F = G.
    const Complex mu = rand_disc(rng, 0.9);
    const StarExpr s1 = StarExpr::exponential(1.0, a1, mu * a1);
    const StarExpr s2 = StarExpr::exponential(1.0, a2, mu * a2);
    commuting = std::max(commuting, coefficient_distance(star(s1, s2, h), star(s2, s1, h)));
  }
  ctx.check("conjugation_distance", conj_err, tol);
  ctx.check("unit_distance", unit_err, tol);
  ctx.check("moyal_commutator_error", commutator, tol);
  ctx.check("aligned_commute_distance", commuting, tol);
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> r;
  r.push_back({"affine-star",
               "(a1 z + b1 zbar + c1) * (a2 z + b2 zbar + c2) = f1 f2 + i hbar (a1 b2 - b1 a2) "
               "= f1 f2 - i hbar (mu1 - mu2) a1 a2",
               1e-10,
               {int_param("trials", 100, "random affine pairs"),
                real_param("hbar_range", 2.0, "hbar drawn from [-range, range]")},
               affine_star});
  r.push_back({"associativity",
               "(f1 * f2) * f3 = f1 * (f2 * f3); exponential triple phase "
               "exp(-i hbar [(a1 b2 - b1 a2) + (a2 b3 - b2 a3) + (a1 b3 - b1 a3)])",
               1e-10,
               {int_param("trials", 100, "random triples"), real_param("phase_tol", 1e-12, "triple-phase tolerance"),
                real_param("hbar_range", 2.0, "hbar drawn from [-range, range]")},
               associativity});
  r.push_back({"cauchy-2var",
               "F(mu1, mu2) = (2 pi i)^-2 oint oint F(zeta1, zeta2) / ((zeta1 - mu1)(zeta2 - mu2)) dzeta1 dzeta2",
               1e-8,
               {complex_param("alpha1", "1", "frequency of f1"), complex_param("alpha2", "2", "frequency of f2"),
                complex_param("mu1", "0.3", "Beltrami coefficient of f1"),
                complex_param("mu2", "-0.2i", "Beltrami coefficient of f2"),
                complex_param("z0", "0.1+0.2i", "evaluation point"), real_param("hbar", 0.5, "deformation parameter"),
                int_param("nodes", 128, "trapezoid nodes per contour"), int_param("trials", 20, "random draws"),
                real_param("fd_tol", 1e-5, "finite-difference tolerance")},
               cauchy_2var});
  r.push_back({"cauchy-nvar",
               "d^m F / d mu^m = (m1! ... mn!) (2 pi i)^-n oint F(zeta) / prod (zeta_j - mu_j)^(m_j + 1) dzeta, n = 3",
               1e-6,
               {complex_param("alpha1", "1", "frequency of f1"), complex_param("alpha2", "2", "frequency of f2"),
                complex_param("alpha3", "-1.5+0.5i", "frequency of f3"),
                complex_param("mu1", "0.3", "Beltrami coefficient of f1"),
                complex_param("mu2", "-0.2i", "Beltrami coefficient of f2"),
                complex_param("mu3", "0.1+0.1i", "Beltrami coefficient of f3"),
                complex_param("z0", "0.1+0.2i", "evaluation point"), real_param("hbar", 0.5, "deformation parameter"),
                int_param("nodes", 64, "trapezoid nodes per contour"), int_param("trials", 1, "random draws")},
               cauchy_nvar});
  r.push_back({"cauchy-riemann",
               "d F / d conj(mu_j) = 0 and d^2 F / d mu_j d conj(mu_k) = 0 for the n-fold exponential star product",
               1e-6,
               {int_param("trials", 20, "random parameter draws"), real_param("step", 1e-4, "finite-difference step"),
                real_param("tol2", 1e-4, "second-order tolerance")},
               cauchy_riemann});
  r.push_back({"conformal-invariance", "|mu(f o phi)| = |mu_f| for conformal phi", 1e-6,
               {int_param("grid", 256, "grid points per axis")}, conformal_invariance});
  r.push_back({"exp-phase",
               "e^{i(a1 z + b1 zbar)} * e^{i(a2 z + b2 zbar)} = exp(-i hbar (a1 b2 - b1 a2)) f1 f2; "
               "truncations obey the exponential remainder bound",
               1e-10,
               {complex_param("alpha1", "1", "z-frequency of f1"), complex_param("beta1", "0.3", "zbar-frequency of f1"),
                complex_param("alpha2", "2", "z-frequency of f2"), complex_param("beta2", "0.5i", "zbar-frequency of f2"),
                real_param("hbar", 0.7, "deformation parameter for the fixed case"),
                int_param("trials", 100, "random draws"), real_param("hbar_range", 2.0, "hbar drawn from [-range, range]"),
                int_param("order", 12, "largest truncation order checked")},
               exp_phase});
  r.push_back({"hbar-series", "F = sum_k hbar^k F^(k) with F^(0) = f1 f2 and F^(1) = i {f1, f2}", 1e-10,
               {int_param("trials", 50, "random pairs"), int_param("max_k", 6, "largest series index"),
                real_param("hbar_range", 1.5, "hbar drawn from [-range, range]")},
               hbar_series});
  r.push_back({"lagrangian-phase",
               "L_star = d_x phi^+ * d_x phi + d_y phi^+ * d_y phi = exp(-i hbar (1 - |mu|^2) |alpha|^2) L, "
               "L = 2 (|d_z phi|^2 + |d_zbar phi|^2)",
               1e-10,
               {complex_param("N", "1", "field amplitude"), complex_param("alpha", "1", "z-frequency"),
                complex_param("beta", "0.5", "zbar-frequency"), real_param("hbar", 1.0, "deformation parameter"),
                int_param("trials", 20, "random draws"), int_param("grid", 32, "grid points per axis")},
               lagrangian_phase});
  r.push_back({"mu-composite",
               "mu_F = (b1 + b2) / (a1 + a2) for F = f1 * f2, independent of hbar; d_zbar F = mu_F d_z F", 1e-10,
               {int_param("trials", 100, "random exponential pairs"), int_param("grid", 32, "grid points per axis")},
               mu_composite});
  r.push_back({"poisson-vanishing",
               "{f1, f2} = (mu2 - mu1) d_z f1 d_z f2, zero iff mu1 = mu2 (also after rotation/dilatation of mu)",
               1e-10, {int_param("trials", 100, "aligned and misaligned pairs")}, poisson_vanishing});
  r.push_back({"qc-classification",
               "quasiconformal iff |d_zbar f| <= k |d_z f| with k < 1, d_z f != 0, and square-integrable derivatives",
               1e-10,
               {int_param("cases", 50, "classification cases"), int_param("grid", 256, "grid points per axis"),
                real_param("k_threshold", kDefaultKThreshold, "strict bound on the sup ratio")},
               qc_classification});
  r.push_back({"star-conjugation",
               "conj(f1 * f2) = conj(f1) * conj(f2) for real hbar; f1 * f2 - f2 * f1 = -2i sin(hbar kappa) f1 f2",
               1e-10,
               {int_param("trials", 100, "random pairs"), real_param("hbar_range", 2.0, "hbar drawn from [-range, range]")},
               star_conjugation});
  std::sort(r.begin(), r.end(), [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
  return r;
}

std::string json_location(const std::string& pointer) { return pointer.empty() ? "/" : pointer; }

}  // namespace

// ---------------------------------------------------------------------------

ParamSet::ParamSet(const std::vector<ParamSpec>& specs, const Overrides& overrides) {
  for (const auto& [name, value] : overrides) {
    if (!declares(specs, name)) throw InvalidOverrideError("unknown parameter '" + name + "'");
  }
  for (const ParamSpec& spec : specs) {
    auto it = overrides.find(spec.name);
    const std::string& text = it != overrides.end() ? it->second : spec.default_value;
    std::string canonical;
    switch (spec.kind) {
      case ParamKind::real:
        if (const auto v = to_real(text)) canonical = format_number(*v);
        break;
      case ParamKind::integer:
        if (const auto v = to_integer(text)) canonical = std::to_string(*v);
        break;
      case ParamKind::complex:
        if (const auto v = to_complex(text)) canonical = format_complex(*v);
        break;
    }
    if (canonical.empty()) {
      throw InvalidOverrideError("parameter '" + spec.name + "' expects a " + std::string(kind_name(spec.kind)) +
                                 " value, got '" + text + "'");
    }
    values_[spec.name] = text;
    kinds_[spec.name] = spec.kind;
    entries_.emplace_back(spec.name, canonical);
  }
}

const std::string& ParamSet::raw(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::logic_error("scenario reads undeclared parameter '" + name + "'");
  return it->second;
}

double ParamSet::real(const std::string& name) const { return *to_real(raw(name)); }
std::int64_t ParamSet::integer(const std::string& name) const { return *to_integer(raw(name)); }
Complex ParamSet::complex(const std::string& name) const { return *to_complex(raw(name)); }

ScenarioContext::ScenarioContext(ParamSet params)
    : params_(std::move(params)), rng_(static_cast<std::uint64_t>(params_.integer("seed"))) {}

bool ScenarioContext::check(const std::string& name, double value, double bound) {
  residual(name, value);
  const bool ok = value <= bound;
  if (!ok) {
    ++failures_;
    witness(name, "value " + format_number(value) + " exceeds bound " + format_number(bound));
  }
  return ok;
}

bool ScenarioContext::check_count(const std::string& name, std::size_t failures, std::size_t total) {
  residual(name, static_cast<double>(failures));
  if (failures == 0) return true;
  ++failures_;
  witness(name, std::to_string(failures) + " of " + std::to_string(total));
  return false;
}

void ScenarioContext::residual(const std::string& name, double value) { report_.residuals.emplace_back(name, value); }

void ScenarioContext::witness(const std::string& name, std::string value) {
  report_.witnesses.emplace_back(name, std::move(value));
}

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> r = build_registry();
  return r;
}

const Scenario* find_scenario(std::string_view id) {
  for (const Scenario& s : registry()) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MWQC_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
  }
  return 42;
}

CheckReport run_scenario(std::string_view id, const Overrides& overrides, const RunOptions& options) {
  const Scenario* s = find_scenario(id);
  if (!s) throw UnknownScenarioError("unknown scenario '" + std::string(id) + "'");

  ScenarioContext ctx(ParamSet(full_specs(*s), overrides));
  const auto start = std::chrono::steady_clock::now();
  bool errored = false;
  try {
    s->body(ctx);
  } catch (const std::exception& e) {
    errored = true;
    ctx.report().message = e.what();
    ctx.witness("exception", e.what());
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  CheckReport report = std::move(ctx.report());
  report.scenario = s->id;
  report.identity = s->identity;
  report.tolerance = ctx.params().real("tol");
  report.parameters = ctx.params().entries();
  report.status = errored ? Status::error : (ctx.all_passed() ? Status::pass : Status::fail);
  if (options.timing) report.wall_time_seconds = elapsed.count();
  return report;
}

ConfigOverrides parse_config(std::string_view json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config /: expected an object");

  ConfigOverrides out;
  for (const auto& [key, value] : root.items()) {
    if (key != "overrides") throw ConfigError("config /" + key + ": unknown key (expected \"overrides\")");
  }
  if (!root.contains("overrides")) return out;
  const auto& overrides = root["overrides"];
  if (!overrides.is_object()) throw ConfigError("config /overrides: expected an object");

  for (const auto& [id, params] : overrides.items()) {
    const std::string where = json_location("/overrides/" + id);
    const Scenario* s = id == "*" ? nullptr : find_scenario(id);
    if (id != "*" && !s) throw ConfigError("config " + where + ": unknown scenario '" + id + "'");
    if (!params.is_object()) throw ConfigError("config " + where + ": expected an object");

    Overrides& dst = out[id];
    for (const auto& [name, v] : params.items()) {
      const std::string at = where + "/" + name;
      const bool known = s ? declares(full_specs(*s), name)
                           : std::any_of(registry().begin(), registry().end(),
                                         [&](const Scenario& sc) { return declares(full_specs(sc), name); });
      if (!known) throw ConfigError("config " + at + ": unknown parameter '" + name + "'");
      if (v.is_string()) {
        dst[name] = v.get<std::string>();
      } else if (v.is_number()) {
        dst[name] = v.dump();
      } else {
        throw ConfigError("config " + at + ": expected a number or string");
      }
    }
  }
  return out;
}

ConfigOverrides load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RunAllResult run_all(const ConfigOverrides& config, const Overrides& global, const RunOptions& options) {
  RunAllResult result;
  for (const Scenario& s : registry()) {
    const auto specs = full_specs(s);
    Overrides merged;
    const auto apply = [&](const Overrides& src, bool filter) {
      for (const auto& [k, v] : src) {
        if (!filter || declares(specs, k)) merged[k] = v;
      }
    };
    if (auto it = config.find("*"); it != config.end()) apply(it->second, true);
    if (auto it = config.find(s.id); it != config.end()) apply(it->second, false);
    apply(global, true);

    result.reports.push_back(run_scenario(s.id, merged, options));
    if (result.reports.back().status != Status::pass) result.exit_status = 1;
  }
  return result;
}

RunAllResult run_all(const std::optional<std::filesystem::path>& config_path, const RunOptions& options) {
  const ConfigOverrides config = config_path ? load_config(*config_path) : ConfigOverrides{};
  return run_all(config, {}, options);
}

}  // namespace mwqc::verify
