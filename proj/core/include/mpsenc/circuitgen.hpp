#pragma once

#include <array>
#include <vector>

#include "mpsenc/circuit.hpp"
#include "mpsenc/mps.hpp"

namespace mpsenc {

// Exact gate realization of a 4x2 isometry, V[2s+r, l] with s the main-wire
// output bit and r the ancilla bit: applying the gates to (input on q_main,
// |0> on q_anc) acts as V, up to a global phase, with at most 2 CNOTs.
// real_mode requires a real V and emits RY-only rotations. A 2x1 V prepares
// a single-qubit state on q_main (q_anc ignored).
std::vector<Gate> synthesize_isometry(const Eigen::MatrixXcd& v, int q_main, int q_anc,
                                      bool real_mode);

// 15-parameter central-gate ansatz:
//   [Rz-Ry-Rz on each qubit] CNOT [RY (x) RZ] CNOT [Rz-Ry-Rz on each qubit]
// (p[14] = global phase, never emitted).
struct UlamParams {
  std::array<double, 15> p{};
};

Eigen::Matrix4cd u_lambda_matrix(const UlamParams& params);

// First-layer mode: RY(2 atan2(lam1, lam0)) then CNOT, preparing
// lam0|00> + lam1|11>. lam1 may carry a sign from the layer gauge.
std::vector<Gate> synthesize_u_lambda(double lam0, double lam1, int q_hi, int q_lo);

// Variational mode: emit the ansatz, dropping identity rotations and, when
// both mid rotations vanish, the CNOT pair around them.
std::vector<Gate> synthesize_u_lambda(const UlamParams& params, int q_hi, int q_lo);

// Derivative-free refinement (deterministic Nelder-Mead, best-seen semantics)
// of -log p of the all-zeros outcome after applying the inverse ansatz at the
// origin bond of `state`. Real states restrict to the RY parameters.
UlamParams optimize_u_lambda(const Mps& state, int origin, const UlamParams& init,
                             int budget = 500);

// One full V layer for a chi<=2 MPS: central u_lambda (first-layer mode) on
// qubits (origin-1, origin), then isometry staircases out to both edges.
// Verified to reproduce m2 from |0...0> with fidelity >= 1 - 1e-9.
std::vector<Gate> exact_layer_from_chi2(const Mps& m2, int origin);

struct BuildOptions {
  int n_layers = 1;
  int origin = -1;          // fixed origin bond, or -1 to scan per layer
  double eps_trunc = 0.0;   // skip bonds whose Schmidt tail weight is below this
  int chi_sim = 64;         // cap for the inverse-application MPS simulator
};

struct BuildResult {
  Circuit circuit;
  std::vector<double> layer_fidelity;  // |<0...0|residual>|^2 after each layer removal
  double fidelity = 0.0;               // simulated circuit state vs the input MPS
  double discarded_weight = 0.0;       // cumulative SVD truncation weight
  bool chi_sim_warning = false;        // discarded weight exceeded 1e-6
};

// Iterative disentangling: truncate residual to chi<=2 with eps_trunc gating,
// build a layer (analytic u_lambda on layer 1, variational afterwards), apply
// its inverse to the residual on the capped MPS simulator, repeat; final
// circuit is the layers in reverse removal order.
BuildResult build_encoding_circuit(const Mps& m, const BuildOptions& opt);

}  // namespace mpsenc
