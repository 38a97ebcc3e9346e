#include <benchmark/benchmark.h>

#include "mpsenc/analytic.hpp"
#include "mpsenc/circuitgen.hpp"
#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"
#include "mpsenc/simulate.hpp"
#include "mpsenc/tci.hpp"

using namespace mpsenc;

namespace {

DistributionSpec normal_spec() { return {DistKind::normal, 0.5, 0.125, 1.0, 1.0}; }
DistributionSpec levy_spec() { return {DistKind::levy, 0.0, 1.0, 1.0, 1.0}; }

Eigen::VectorXcd dense_state(int n) {
  return discretize(sqrt_pdf_oracle(normal_spec()), Grid(n, 1.0));
}

}  // namespace

static void BM_discretize(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  FunctionOracle o = sqrt_pdf_oracle(normal_spec());
  Grid g(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(o, g));
}
BENCHMARK(BM_discretize)->Arg(14)->Arg(18);

static void BM_mps_from_vector(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Eigen::VectorXcd v = dense_state(n);
  for (auto _ : state) benchmark::DoNotOptimize(mps_from_vector(v));
}
BENCHMARK(BM_mps_from_vector)->Arg(12)->Arg(16);

static void BM_canonicalize(benchmark::State& state) {
  Mps m = mps_from_vector(dense_state(14));
  for (auto _ : state) {
    Mps c = m;
    canonicalize(c, 7);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_canonicalize);

static void BM_g1_quadrature(benchmark::State& state) {
  FunctionOracle o = sqrt_pdf_oracle(levy_spec());
  for (auto _ : state) benchmark::DoNotOptimize(g1(o, 1.0));
}
BENCHMARK(BM_g1_quadrature);

static void BM_layer_build(benchmark::State& state) {
  Mps m = mps_from_vector(dense_state(12));
  BuildOptions opt;
  opt.n_layers = static_cast<int>(state.range(0));
  opt.origin = 4;
  for (auto _ : state) benchmark::DoNotOptimize(build_encoding_circuit(m, opt));
}
BENCHMARK(BM_layer_build)->Arg(1)->Arg(2);

static void BM_apply_circuit(benchmark::State& state) {
  bool dense = state.range(0) != 0;
  Mps m = mps_from_vector(dense_state(14));
  BuildOptions opt;
  opt.n_layers = 2;
  opt.origin = 4;
  Circuit c = build_encoding_circuit(m, opt).circuit;
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_circuit(c, zero_state(14, dense, 32)));
}
BENCHMARK(BM_apply_circuit)->Arg(1)->Arg(0);

static void BM_tci_build(benchmark::State& state) {
  FunctionOracle o = sqrt_pdf_oracle(levy_spec());
  Grid g(static_cast<int>(state.range(0)), 1.0);
  TciConfig cfg;
  cfg.max_rank = 16;
  for (auto _ : state) benchmark::DoNotOptimize(tci_build(o, g, cfg));
}
BENCHMARK(BM_tci_build)->Arg(16)->Arg(24);

static void BM_sample(benchmark::State& state) {
  bool dense = state.range(0) != 0;
  QuantumState st = state_from_mps(mps_from_vector(dense_state(16)), dense);
  for (auto _ : state) benchmark::DoNotOptimize(sample(st, 1000, 7));
}
BENCHMARK(BM_sample)->Arg(1)->Arg(0);

BENCHMARK_MAIN();
