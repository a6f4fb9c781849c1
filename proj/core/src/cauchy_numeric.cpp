#include "mwqc/cauchy_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mwqc/star_engine.hpp"

namespace mwqc {

namespace {

void check_arity(const MuFunction& mf, std::size_t n) {
  if (n != mf.arity()) {
    throw CauchyError("expected " + std::to_string(mf.arity()) + " Beltrami coefficients, got " +
                      std::to_string(n));
  }
}

double factorial(int m) {
  double r = 1.0;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

struct ContourNodes {
  std::vector<Complex> zeta;
  std::vector<Complex> weight;
};

// Periodic trapezoid on zeta = c + r e^{i theta}: dzeta / (2 pi i) = (zeta - c) dtheta / (2 pi),
// so the node weight is (zeta - c) m! / (N (zeta - mu)^{m+1}).
ContourNodes build_nodes(const ContourSpec& c, Complex mu, int order) {
  if (!(c.radius > 0.0) || !std::isfinite(c.radius)) throw CauchyError("contour radius must be positive");
  if (c.nodes < kMinContourNodes) {
    throw CauchyError("contour needs at least " + std::to_string(kMinContourNodes) + " nodes");
  }
  if (!(std::abs(mu - c.center) < c.radius)) {
    throw CauchyError("Beltrami coefficient is not strictly inside its contour");
  }
  if (order < 0) throw CauchyError("derivative orders must be nonnegative");

  ContourNodes out;
  out.zeta.reserve(static_cast<std::size_t>(c.nodes));
  out.weight.reserve(static_cast<std::size_t>(c.nodes));
  const double scale = factorial(order) / c.nodes;
  for (int k = 0; k < c.nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / c.nodes;
    const Complex offset = std::polar(c.radius, theta);
    const Complex zeta = c.center + offset;
    out.zeta.push_back(zeta);
    out.weight.push_back(offset * scale / std::pow(zeta - mu, order + 1));
  }
  return out;
}

Complex nested_quadrature(const MuFunction& mf, std::span<const Complex> mus, std::span<const int> orders,
                          std::span<const ContourSpec> contours) {
  check_arity(mf, mus.size());
  const std::size_t n = mus.size();
  if (n > kMaxCauchyDimension) {
    throw CauchyError("Cauchy quadrature supports at most " + std::to_string(kMaxCauchyDimension) +
                      " variables");
  }
  if (contours.size() != n || orders.size() != n) {
    throw CauchyError("need one contour and one derivative order per variable");
  }

  std::vector<ContourNodes> nodes;
  nodes.reserve(n);
  for (std::size_t j = 0; j < n; ++j) nodes.push_back(build_nodes(contours[j], mus[j], orders[j]));

  std::vector<std::size_t> idx(n, 0);
  std::vector<Complex> zeta(n);
  Complex sum{0.0, 0.0};
  while (true) {
    Complex w{1.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      zeta[j] = nodes[j].zeta[idx[j]];
      w *= nodes[j].weight[idx[j]];
    }
    sum += w * mf(zeta);

    std::size_t j = n;
    while (j > 0) {
      --j;
      if (++idx[j] < nodes[j].zeta.size()) break;
      idx[j] = 0;
      if (j == 0) return sum;
    }
  }
}

Complex dbar_at(const MuFunction& mf, std::vector<Complex> mus, std::size_t j, double h) {
  const Complex mu = mus[j];
  mus[j] = mu + h;
  const Complex fp = mf(mus);
  mus[j] = mu - h;
  const Complex fm = mf(mus);
  mus[j] = mu + kI * h;
  const Complex fip = mf(mus);
  mus[j] = mu - kI * h;
  const Complex fim = mf(mus);
  const Complex du = (fp - fm) / (2.0 * h);
  const Complex dv = (fip - fim) / (2.0 * h);
  return 0.5 * (du + kI * dv);
}

void check_step(const MuFunction& mf, std::span<const Complex> mus, std::size_t j, double step) {
  check_arity(mf, mus.size());
  if (j >= mf.arity()) throw CauchyError("variable index out of range");
  if (!(step > 0.0) || !std::isfinite(step)) throw CauchyError("finite-difference step must be positive");
}

}  // namespace

MuFunction::MuFunction(std::vector<Complex> alphas, Complex z0, double hbar)
    : alphas_(std::move(alphas)), z0_(z0), hbar_(hbar) {
  if (alphas_.empty()) throw CauchyError("MuFunction needs at least one factor");
  for (const Complex a : alphas_) {
    if (a == Complex{}) throw CauchyError("zero frequency: F does not depend on that mu");
  }
  if (!std::isfinite(hbar_)) throw CauchyError("hbar must be finite");
}

Complex MuFunction::operator()(std::span<const Complex> mus) const {
  check_arity(*this, mus.size());
  std::vector<StarExpr> factors;
  factors.reserve(mus.size());
  for (std::size_t j = 0; j < mus.size(); ++j) {
    factors.push_back(StarExpr::exponential(1.0, alphas_[j], mus[j] * alphas_[j]));
  }
  return eval(star_n(factors, StarConfig{hbar_, std::nullopt}), z0_);
}

Complex MuFunction::log_derivative(std::size_t j) const {
  Complex pairing{0.0, 0.0};
  for (std::size_t k = 0; k < alphas_.size(); ++k) {
    if (k == j) continue;
    pairing += (j < k ? 1.0 : -1.0) * alphas_[j] * alphas_[k];
  }
  return kI * (alphas_[j] * std::conj(z0_) + hbar_ * pairing);
}

Complex MuFunction::closed_form(std::span<const Complex> mus) const {
  check_arity(*this, mus.size());
  Complex alpha_sum{0.0, 0.0};
  Complex exponent{0.0, 0.0};
  for (std::size_t j = 0; j < alphas_.size(); ++j) {
    alpha_sum += alphas_[j];
    exponent += log_derivative(j) * mus[j];
  }
  return std::exp(kI * alpha_sum * z0_ + exponent);
}

Complex mu_function_eval(const MuFunction& mf, std::span<const Complex> mus) { return mf(mus); }

std::vector<ContourSpec> default_contours(std::span<const Complex> mus, int nodes) {
  std::vector<ContourSpec> out;
  out.reserve(mus.size());
  for (const Complex mu : mus) out.push_back(ContourSpec{{}, 2.0 * std::max(1.0, std::abs(mu)), nodes});
  return out;
}

Complex cauchy_reproduce(const MuFunction& mf, std::span<const Complex> mus,
                         std::span<const ContourSpec> contours) {
  const std::vector<int> zero_orders(mus.size(), 0);
  return nested_quadrature(mf, mus, zero_orders, contours);
}

Complex cauchy_derivative(const MuFunction& mf, std::span<const Complex> mus, std::span<const int> orders,
                          std::span<const ContourSpec> contours) {
  return nested_quadrature(mf, mus, orders, contours);
}

Complex analytic_derivative(const MuFunction& mf, std::span<const Complex> mus, std::span<const int> orders) {
  check_arity(mf, mus.size());
  if (orders.size() != mus.size()) throw CauchyError("need one derivative order per variable");
  Complex factor{1.0, 0.0};
  for (std::size_t j = 0; j < orders.size(); ++j) {
    if (orders[j] < 0) throw CauchyError("derivative orders must be nonnegative");
    factor *= std::pow(mf.log_derivative(j), orders[j]);
  }
  return factor * mf.closed_form(mus);
}

double cr_residual(const MuFunction& mf, std::span<const Complex> mus, std::size_t j, double step) {
  check_step(mf, mus, j, step);
  return std::abs(dbar_at(mf, {mus.begin(), mus.end()}, j, step));
}

double cr_mixed_residual(const MuFunction& mf, std::span<const Complex> mus, std::size_t j,
                         std::size_t k, double step) {
  check_step(mf, mus, j, step);
  check_step(mf, mus, k, step);
  std::vector<Complex> probe(mus.begin(), mus.end());
  const Complex mu = probe[j];
  const auto g = [&](Complex at) {
    probe[j] = at;
    return dbar_at(mf, probe, k, step);
  };
  const Complex du = (g(mu + step) - g(mu - step)) / (2.0 * step);
  const Complex dv = (g(mu + kI * step) - g(mu - kI * step)) / (2.0 * step);
  return std::abs(0.5 * (du - kI * dv));
}

}  // namespace mwqc
