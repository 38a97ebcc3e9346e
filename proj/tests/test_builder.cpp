#include <cmath>

#include "doctest.h"
#include "mpsenc/circuit.hpp"
#include "mpsenc/circuitgen.hpp"
#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"
#include "mpsenc/simulate.hpp"

using namespace mpsenc;

namespace {

Mps encoded_state(DistKind kind, double mu, double scale, double L, int n) {
  DistributionSpec d{kind, mu, scale, 1.0, L};
  Grid g(n, L);
  return mps_from_vector(discretize(sqrt_pdf_oracle(d), g));
}

double circuit_state_fidelity(const Circuit& c, const Mps& target) {
  QuantumState zero = zero_state(c.n_qubits, c.n_qubits <= 20);
  ApplyResult r = apply_circuit(c, zero);
  return state_fidelity(r.state, target);
}

}  // namespace

TEST_CASE("one layer reconstructs a chi-2 state exactly") {
  Mps m = encoded_state(DistKind::normal, 0.5, 0.1, 1.0, 10);
  Mps m2 = truncate(m, 2);
  for (int origin : {3, 5, 8}) {
    auto gates = exact_layer_from_chi2(m2, origin);
    Circuit c;
    c.n_qubits = 10;
    c.gates = gates;
    CHECK(circuit_state_fidelity(c, m2) >= 1.0 - 1e-9);
  }
}

TEST_CASE("build on a chi-2 state is exact with one layer") {
  Mps m2 = truncate(encoded_state(DistKind::levy, 0.0, 0.3, 1.0, 9), 2);
  BuildOptions opt;
  opt.n_layers = 1;
  BuildResult r = build_encoding_circuit(m2, opt);
  CHECK(r.fidelity >= 1.0 - 1e-9);
  CHECK(r.layer_fidelity.size() == 1);
}

TEST_CASE("a second layer only helps") {
  Mps m = encoded_state(DistKind::log_normal, -1.8, 0.45, 1.0, 10);
  BuildOptions one;
  one.n_layers = 1;
  BuildOptions two;
  two.n_layers = 2;
  double f1 = build_encoding_circuit(m, one).fidelity;
  BuildResult r2 = build_encoding_circuit(m, two);
  CHECK(r2.fidelity >= f1 - 1e-12);
  CHECK(r2.fidelity > 0.99);
  CHECK(r2.circuit.layers.size() == 2);
}

TEST_CASE("build output is fully lowered and annotated") {
  Mps m = encoded_state(DistKind::normal, 0.5, 0.08, 1.0, 8);
  BuildOptions opt;
  opt.n_layers = 2;
  BuildResult r = build_encoding_circuit(m, opt);
  for (const auto& g : r.circuit.gates) CHECK(g.kind != GateKind::U2Q);
  REQUIRE(r.circuit.layers.size() == 2);
  // layer gate ranges tile the gate list in order
  CHECK(r.circuit.layers[0].gate_begin == 0);
  CHECK(r.circuit.layers[0].gate_end == r.circuit.layers[1].gate_begin);
  CHECK(r.circuit.layers[1].gate_end == r.circuit.gates.size());
  CircuitMetrics met = circuit_metrics(r.circuit);
  CHECK(met.cnot_count > 0);
  CHECK(met.depth > 0);
}

TEST_CASE("simulated fidelity is reported faithfully") {
  Mps m = encoded_state(DistKind::normal, 0.5, 0.12, 1.0, 9);
  BuildOptions opt;
  opt.n_layers = 2;
  BuildResult r = build_encoding_circuit(m, opt);
  CHECK(circuit_state_fidelity(r.circuit, m) == doctest::Approx(r.fidelity).epsilon(1e-9));
}

TEST_CASE("a loose truncation threshold prunes edge bonds") {
  Mps m = encoded_state(DistKind::normal, 0.5, 0.05, 1.0, 10);
  BuildOptions tight;
  tight.n_layers = 1;
  BuildOptions loose = tight;
  loose.eps_trunc = 1e-2;
  BuildResult rt = build_encoding_circuit(m, tight);
  BuildResult rl = build_encoding_circuit(m, loose);
  CHECK(!rl.circuit.layers[0].skipped_bonds.empty());
  CHECK(circuit_metrics(rl.circuit).cnot_count <= circuit_metrics(rt.circuit).cnot_count);
  // skipped tails cost little fidelity at this threshold
  CHECK(rl.fidelity >= 0.98);
}

TEST_CASE("fixed origin is honored and scanning does at least as well") {
  Mps m = encoded_state(DistKind::levy, 0.0, 1.0, 1024.0, 12);
  double worst = 1.0, best = 0.0;
  for (int origin = 2; origin <= 10; origin += 2) {
    BuildOptions opt;
    opt.n_layers = 1;
    opt.origin = origin;
    BuildResult r = build_encoding_circuit(m, opt);
    CHECK(r.circuit.layers[0].origin == origin);
    worst = std::min(worst, r.fidelity);
    best = std::max(best, r.fidelity);
  }
  BuildOptions scan;
  scan.n_layers = 1;
  BuildResult rs = build_encoding_circuit(m, scan);
  CHECK(rs.fidelity >= best - 1e-10);
  CHECK(best >= worst);
}

TEST_CASE("builds are deterministic") {
  Mps m = encoded_state(DistKind::levy, 0.0, 0.2, 1.0, 9);
  BuildOptions opt;
  opt.n_layers = 2;
  BuildResult a = build_encoding_circuit(m, opt);
  BuildResult b = build_encoding_circuit(m, opt);
  REQUIRE(a.circuit.gates.size() == b.circuit.gates.size());
  for (std::size_t i = 0; i < a.circuit.gates.size(); ++i) {
    CHECK(a.circuit.gates[i].kind == b.circuit.gates[i].kind);
    CHECK(a.circuit.gates[i].angle == b.circuit.gates[i].angle);
  }
  CHECK(a.fidelity == b.fidelity);
}

TEST_CASE("optimize_u_lambda refines the analytic start on a two-qubit state") {
  // any 2-qubit state is reachable by the 15-parameter ansatz
  Eigen::VectorXcd v(4);
  v << cplx(0.72, 0.1), cplx(0.05, -0.02), cplx(-0.03, 0.04), cplx(0.55, 0.4);
  v /= v.norm();
  Mps m = canonicalize(mps_from_vector(v), 1);

  auto prepared_fidelity = [&](const UlamParams& p) {
    Circuit c;
    c.n_qubits = 2;
    c.gates = synthesize_u_lambda(p, 0, 1);
    return state_fidelity(apply_circuit(c, zero_state(2, true)).state, m);
  };

  UlamParams init;
  const auto& lam = m.schmidt[0];
  init.p[6] = 2.0 * std::atan2(lam.size() > 1 ? lam(1) : 0.0, lam(0));
  double f_init = prepared_fidelity(init);
  UlamParams out = optimize_u_lambda(m, 1, init, 500);
  double f_out = prepared_fidelity(out);
  CHECK(f_out >= f_init - 1e-12);
  CHECK(f_out >= 0.99);
}
