#include <cmath>
#include <random>

#include "doctest.h"
#include "mpsenc/circuit.hpp"
#include "mpsenc/circuitgen.hpp"
#include "mpsenc/simulate.hpp"

using namespace mpsenc;

namespace {

// Apply gates on (q_main=0, q_anc=1); dense index then equals the 2s+r row
// convention of the isometry.
Eigen::Vector4cd run_gates(const std::vector<Gate>& gates, int l) {
  QuantumState st = zero_state(2, true);
  st.vec.setZero();
  st.vec(2 * l) = 1.0;  // input l on the main wire, ancilla |0>
  Circuit c;
  c.n_qubits = 2;
  c.gates = gates;
  QuantumState out = apply_circuit(c, st).state;
  return Eigen::Vector4cd(out.vec);
}

// Worst column error after the one global phase that aligns column 0.
double isometry_error(const Eigen::MatrixXcd& v, const std::vector<Gate>& gates) {
  Eigen::Vector4cd c0 = run_gates(gates, 0);
  cplx ph = c0.dot(v.col(0));  // conj(c0) . v0
  if (std::abs(ph) > 0.0) ph /= std::abs(ph);
  double err = (ph * c0 - v.col(0)).norm();
  if (v.cols() > 1) {
    Eigen::Vector4cd c1 = run_gates(gates, 1);
    err = std::max(err, (ph * c1 - v.col(1)).norm());
  }
  return err;
}

int cnots_in(const std::vector<Gate>& gates) {
  int n = 0;
  for (const auto& g : gates) n += g.kind == GateKind::CNOT;
  return n;
}

Eigen::MatrixXcd random_isometry(std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, 2);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) a(i, j) = real ? cplx(g(rng), 0.0) : cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return Eigen::MatrixXcd(qr.householderQ()).leftCols(2);
}

}  // namespace

TEST_CASE("generic isometries synthesize to <= 2 CNOTs") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::MatrixXcd v = random_isometry(rng, false);
    auto gates = synthesize_isometry(v, 0, 1, false);
    CHECK(cnots_in(gates) <= 2);
    CHECK(isometry_error(v, gates) <= 1e-10);
  }
}

TEST_CASE("real isometries synthesize to real circuits") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::MatrixXcd v = random_isometry(rng, true);
    auto gates = synthesize_isometry(v, 0, 1, true);
    CHECK(cnots_in(gates) <= 2);
    CHECK(isometry_error(v, gates) <= 1e-7);
    for (const auto& g : gates) {
      bool ok = g.kind == GateKind::RY || g.kind == GateKind::CNOT;
      CHECK(ok);
    }
  }
}

TEST_CASE("near-product isometries stay within the snap tolerance") {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> gau;
  for (double eps : {1e-9, 1e-7, 1e-5, 1e-3}) {
    for (int trial = 0; trial < 40; ++trial) {
      // start from a product map |l> -> (RY(a)|l>) (x) (RY(b)|0>), then perturb
      double a = gau(rng), b = gau(rng);
      Eigen::Matrix2d ra, rb;
      ra << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
      rb << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
      Eigen::MatrixXcd v(4, 2);
      for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
          for (int l = 0; l < 2; ++l) v(2 * s + r, l) = ra(s, l) * rb(r, 0);
      Eigen::MatrixXcd noise(4, 2);
      for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) noise(i, j) = cplx(gau(rng), 0.0);
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(v + eps * noise);
      Eigen::MatrixXcd vp = Eigen::MatrixXcd(qr.householderQ()).leftCols(2);
      if (trial % 2 == 1) vp.col(1) *= -1.0;  // cover the det -1 branch

      auto gates = synthesize_isometry(vp, 0, 1, true);
      CHECK(cnots_in(gates) <= 2);
      CHECK(isometry_error(vp, gates) <= 1e-6);
    }
  }
}

TEST_CASE("nearly dependent columns synthesize cleanly") {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> gau;
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::MatrixXcd v = random_isometry(rng, true);
    Eigen::MatrixXcd w(4, 2);
    w.col(0) = v.col(0);
    w.col(1) = v.col(0) + 1e-6 * v.col(1);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
    Eigen::MatrixXcd vp = Eigen::MatrixXcd(qr.householderQ()).leftCols(2);
    auto gates = synthesize_isometry(vp, 0, 1, true);
    CHECK(isometry_error(vp, gates) <= 1e-6);
  }
}

TEST_CASE("single-column input prepares a one-qubit state") {
  Eigen::MatrixXcd v(2, 1);
  v << 0.6, 0.8;
  auto gates = synthesize_isometry(v, 0, 1, true);
  CHECK(cnots_in(gates) == 0);
  QuantumState st = zero_state(2, true);
  Circuit c;
  c.n_qubits = 2;
  c.gates = gates;
  QuantumState out = apply_circuit(c, st).state;
  CHECK(std::abs(std::abs(out.vec(0)) - 0.6) <= 1e-12);
  CHECK(std::abs(std::abs(out.vec(2)) - 0.8) <= 1e-12);
}

TEST_CASE("product isometries need no CNOT") {
  // columns of RY(0.4) (x) RY(0.9)|0> form an exactly factorized isometry
  double a = 0.2, b = 0.45;
  Eigen::Matrix2d ra, rb;
  ra << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  rb << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
  Eigen::MatrixXcd v(4, 2);
  for (int s = 0; s < 2; ++s)
    for (int r = 0; r < 2; ++r)
      for (int l = 0; l < 2; ++l) v(2 * s + r, l) = ra(s, l) * rb(r, 0);
  auto gates = synthesize_isometry(v, 0, 1, true);
  CHECK(cnots_in(gates) == 0);
  CHECK(isometry_error(v, gates) <= 1e-12);
}

TEST_CASE("u_lambda first-layer mode prepares the two-level schmidt state") {
  const std::pair<double, double> cases[] = {
      {1.0, 0.0}, {0.8, 0.6}, {0.8, -0.6}, {std::sqrt(0.5), std::sqrt(0.5)}};
  for (auto [l0, l1] : cases) {
    auto gates = synthesize_u_lambda(l0, l1, 0, 1);
    QuantumState st = zero_state(2, true);
    Circuit c;
    c.n_qubits = 2;
    c.gates = gates;
    QuantumState out = apply_circuit(c, st).state;
    CHECK(std::abs(out.vec(0) - cplx(l0, 0)) <= 1e-12);
    CHECK(std::abs(out.vec(3) - cplx(l1, 0)) <= 1e-12);
    CHECK(std::abs(out.vec(1)) + std::abs(out.vec(2)) <= 1e-12);
  }
}

TEST_CASE("u_lambda ansatz matrix is unitary and the emitted gates match it") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    UlamParams p;
    for (auto& x : p.p) x = u(rng);
    Eigen::Matrix4cd m = u_lambda_matrix(p);
    CHECK((m * m.adjoint() - Eigen::Matrix4cd::Identity()).norm() <= 1e-12);

    auto gates = synthesize_u_lambda(p, 0, 1);
    Circuit c;
    c.n_qubits = 2;
    c.gates = gates;
    Eigen::Matrix4cd acc;
    for (int j = 0; j < 4; ++j) {
      QuantumState st = zero_state(2, true);
      st.vec.setZero();
      st.vec(j) = 1.0;
      acc.col(j) = apply_circuit(c, st).state.vec;
    }
    cplx ph = (acc.adjoint() * m).trace() / 4.0;
    ph /= std::abs(ph);
    CHECK((m - ph * acc).norm() <= 1e-11);
  }
}
