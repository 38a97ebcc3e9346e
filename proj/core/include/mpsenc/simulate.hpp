#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>

#include "mpsenc/circuit.hpp"
#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"

namespace mpsenc {

// Either a dense statevector (N <= 28) or an MPS with bond cap chi_sim.
struct QuantumState {
  int n_qubits = 0;
  bool use_dense = true;
  int chi_sim = 64;
  Eigen::VectorXcd vec;  // dense path; index = grid index (qubit 0 = MSB)
  Mps mps;               // MPS path

  double norm() const;
  cplx amplitude(std::uint64_t bits) const;
};

QuantumState zero_state(int n_qubits, bool use_dense, int chi_sim = 64);
QuantumState state_from_mps(const Mps& m, bool use_dense, int chi_sim = 64);

struct ApplyResult {
  QuantumState state;
  double discarded_weight = 0.0;  // cumulative SVD weight dropped at the chi_sim cap
  bool chi_sim_warning = false;   // discarded_weight > 1e-6
};

// Gates applied in circuit order. Dense path is exact; MPS path truncates to
// chi_sim after every two-qubit gate (which must act on adjacent qubits).
ApplyResult apply_circuit(const Circuit& c, const QuantumState& init);

// |<state|m>|^2.
double state_fidelity(const QuantumState& state, const Mps& m);

// i.i.d. draws from |amplitude|^2, keyed by grid index. Deterministic in
// (seed, shot): shot k consumes only counter-based randomness for k, so any
// shot subset is reproducible. MPS path samples qubit-by-qubit conditionals.
std::map<std::uint64_t, std::int64_t> sample(const QuantumState& state, std::int64_t shots,
                                             std::uint64_t seed);

struct Histogram {
  Grid grid;
  std::map<std::uint64_t, std::int64_t> counts;
  std::int64_t total_shots() const;
};

void write_histogram_csv(const Histogram& h, std::ostream& os);    // bitstring, x, count
void write_histogram_json(const Histogram& h, std::ostream& os);

}  // namespace mpsenc
