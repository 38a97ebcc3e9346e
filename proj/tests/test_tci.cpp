#include <cmath>
#include <complex>

#include "doctest.h"
#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"
#include "mpsenc/tci.hpp"

using namespace mpsenc;

TEST_CASE("cross interpolation nails a separable function at rank 2") {
  // exp(b x) factorizes over the binary digits of x, so the exact QTT rank is 1
  DistributionSpec d{DistKind::exp_test, 0.0, -3.0, 1.0, 1.0};
  Grid g(12, d.L);
  TciConfig cfg;
  cfg.max_rank = 8;
  TciResult r = tci_build(sqrt_pdf_oracle(d), g, cfg);
  CHECK(r.converged);
  CHECK(r.mps.max_bond() <= 2);
  CHECK(mps_norm(r.mps) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(r.mps, mps_from_vector(discretize(sqrt_pdf_oracle(d), g))) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.error.mean_rel <= 1e-10);
}

TEST_CASE("cross interpolation agrees with the dense build on a heavy tail") {
  DistributionSpec d{DistKind::levy, 0.0, 1.0, 1.0, 1.0};
  Grid g(12, d.L);
  TciConfig cfg;
  cfg.max_rank = 16;
  TciResult r = tci_build(sqrt_pdf_oracle(d), g, cfg);
  CHECK(r.converged);
  Mps exact = mps_from_vector(discretize(sqrt_pdf_oracle(d), g));
  CHECK(fidelity(r.mps, exact) >= 1.0 - 1e-9);
  // documented call budget, with the cache disabled it would still hold
  CHECK(r.oracle_calls <
        8ull * 12ull * static_cast<std::uint64_t>(cfg.max_rank * cfg.max_rank) *
            static_cast<std::uint64_t>(r.sweeps));
}

TEST_CASE("cross interpolation is deterministic") {
  DistributionSpec d{DistKind::log_normal, -1.8, 0.45, 1.0, 1.0};
  Grid g(10, d.L);
  TciConfig cfg;
  cfg.max_rank = 12;
  TciResult a = tci_build(sqrt_pdf_oracle(d), g, cfg);
  TciResult b = tci_build(sqrt_pdf_oracle(d), g, cfg);
  CHECK(a.sweeps == b.sweeps);
  CHECK(a.oracle_calls == b.oracle_calls);
  for (std::uint64_t j : {0ull, 137ull, 512ull, 1023ull})
    CHECK(std::abs(mps_amplitude(a.mps, j) - mps_amplitude(b.mps, j)) <= 1e-15);
}

TEST_CASE("error estimate vanishes on the exactly encoded state") {
  DistributionSpec d{DistKind::normal, 0.5, 0.15, 1.0, 1.0};
  Grid g(10, d.L);
  FunctionOracle o = sqrt_pdf_oracle(d);
  Mps m = mps_from_vector(discretize(o, g));
  TciErrorEstimate e = tci_error_estimate(m, o, g, 200, 3);
  CHECK(e.mean_rel <= 1e-10);
  CHECK(e.max_rel <= 1e-8);
  // a truncated state shows a genuine error
  TciErrorEstimate rough = tci_error_estimate(truncate(m, 1), o, g, 200, 3);
  CHECK(rough.mean_rel > 1e-4);
}

TEST_CASE("cross interpolation scales past the dense grid limit") {
  // wide domain so the density is resolvable everywhere on the fine grid; on
  // L = 1 the far-left bins underflow the sqrt-pdf to exactly zero, which is a
  // quadrature non-problem but makes pointwise relative error meaningless
  DistributionSpec d{DistKind::levy, 0.0, 1.0, 1.0, std::ldexp(1.0, 19)};
  Grid g(30, d.L);
  TciConfig cfg;
  cfg.max_rank = 24;
  TciResult r = tci_build(sqrt_pdf_oracle(d), g, cfg);
  CHECK(r.mps.n_qubits() == 30);
  CHECK(mps_norm(r.mps) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.error.mean_rel <= 1e-6);
  // amplitudes stay in lockstep with the oracle at a spot check
  double x = g.x_of_index(3ull << 20);
  double x2 = g.x_of_index(5ull << 18);
  cplx f1 = sqrt_pdf_oracle(d).eval(x);
  cplx f2 = sqrt_pdf_oracle(d).eval(x2);
  cplx a1 = mps_amplitude(r.mps, 3ull << 20);
  cplx a2 = mps_amplitude(r.mps, 5ull << 18);
  CHECK(std::abs(a1 / a2 - f1 / f2) <= 1e-6 * std::abs(f1 / f2));
}
