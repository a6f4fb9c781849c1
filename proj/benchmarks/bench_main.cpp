#include <benchmark/benchmark.h>

#include <vector>

#include "mwqc/beltrami.hpp"
#include "mwqc/cauchy_numeric.hpp"
#include "mwqc/expr_parser.hpp"
#include "mwqc/star_engine.hpp"

namespace {

using namespace mwqc;

void BM_StarPolynomial(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const StarExpr f = parse("(z + 2*zbar + 1)^" + std::to_string(p));
  const StarExpr g = parse("(3*z - zbar)^" + std::to_string(p));
  for (auto _ : state) benchmark::DoNotOptimize(star(f, g, 0.5));
}
BENCHMARK(BM_StarPolynomial)->Arg(2)->Arg(4)->Arg(8);

void BM_StarExponential(benchmark::State& state) {
  const StarExpr f = parse("z^2*exp(i*(z + 0.3*zbar)) + zbar");
  const StarExpr g = parse("exp(i*(2*z - 0.5*zbar))*zbar^2");
  for (auto _ : state) benchmark::DoNotOptimize(star(f, g, 1.0));
}
BENCHMARK(BM_StarExponential);

void BM_CauchyReproduce(benchmark::State& state) {
  const std::vector<Complex> alphas{1.0, 2.0};
  const std::vector<Complex> mus{0.3, Complex{0.0, -0.2}};
  const MuFunction mf(alphas, Complex{0.1, 0.2}, 0.5);
  const auto contours = default_contours(mus, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cauchy_reproduce(mf, mus, contours));
}
BENCHMARK(BM_CauchyReproduce)->Arg(32)->Arg(128);

void BM_QcCertify(benchmark::State& state) {
  const StarExpr f = parse("z + 0.3*zbar");
  GridDomain dom;
  dom.nx = dom.ny = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qc_certify(f, dom));
}
BENCHMARK(BM_QcCertify)->Arg(64)->Arg(256);

void BM_ParseSerialize(benchmark::State& state) {
  const std::string src = "2*z^2 + 0.5*zbar - exp(i*(z + 0.3*zbar))*(z - 1)^3";
  for (auto _ : state) benchmark::DoNotOptimize(serialize(parse(src)));
}
BENCHMARK(BM_ParseSerialize);

}  // namespace

BENCHMARK_MAIN();
