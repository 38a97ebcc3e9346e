#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mpsenc/funcspace.hpp"

namespace mpsenc {

enum class GateKind { RX, RY, RZ, CNOT, U2Q };

// Rotations: q0 = target. CNOT: q0 = control, q1 = target. U2Q: 4x4 matrix on
// (q0, q1) with basis index 2*bit(q0) + bit(q1); pre-synthesis only.
struct Gate {
  GateKind kind;
  int q0 = 0;
  int q1 = -1;
  double angle = 0.0;
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();

  static Gate rx(int q, double a) { return {GateKind::RX, q, -1, a}; }
  static Gate ry(int q, double a) { return {GateKind::RY, q, -1, a}; }
  static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, a}; }
  static Gate cnot(int c, int t) { return {GateKind::CNOT, c, t, 0.0}; }
  static Gate u2q(int a, int b, const Eigen::Matrix4cd& m) {
    Gate g{GateKind::U2Q, a, b, 0.0};
    g.u = m;
    return g;
  }
  bool two_qubit() const { return kind == GateKind::CNOT || kind == GateKind::U2Q; }
};

struct LayerInfo {
  int origin = 0;                 // central bond of the layer
  std::size_t gate_begin = 0;     // index range into Circuit::gates
  std::size_t gate_end = 0;
  std::vector<int> skipped_bonds; // bonds gated off by eps_trunc
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;        // applied left to right to |0...0>
  std::vector<LayerInfo> layers;
};

struct CircuitMetrics {
  int depth = 0;       // longest dependency chain, counting 1-qubit gates
  int cnot_count = 0;
  int gate_count = 0;
};

// Throws if an unlowered U2Q is present.
CircuitMetrics circuit_metrics(const Circuit& c);

// Replace every U2Q with an exact <=3-CNOT + rotation realization (global
// phase dropped). Rotation-only gates pass through unchanged.
Circuit lower_u2q(const Circuit& c);

// Map angle to (-2*pi, 2*pi] preserving the gate matrix (4*pi period).
double normalize_angle(double a);

Eigen::Matrix2cd rotation_matrix(GateKind kind, double angle);

// Dense 4x4 of any two-qubit gate in the (q0, q1) ordering above.
Eigen::Matrix4cd gate_matrix4(const Gate& g);

// OpenQASM 2.0 with rx/ry/rz/cx, qubit 0 = most significant scale bit;
// layer annotations emitted as comments.
void write_qasm(const Circuit& c, std::ostream& os);

void write_circuit_json(const Circuit& c, std::ostream& os);

}  // namespace mpsenc
