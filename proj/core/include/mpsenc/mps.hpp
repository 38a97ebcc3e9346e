#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mpsenc/funcspace.hpp"

namespace mpsenc {

// Matrix product state. tensors[k].site[s] is the chi_k x chi_{k+1} matrix of
// site k (0-based) at physical index s. Bonds are numbered 1..N-1, bond k
// separating sites 0..k-1 from k..N-1. When canonical_center = c >= 1, sites
// left of bond c are left isometries, sites right of it right isometries, and
// the state contracts with diag(schmidt[c-1]) inserted at bond c. When
// canonical_center = -1 the tensors contract directly.
struct Mps {
  struct Site {
    std::array<Eigen::MatrixXcd, 2> m;
    Eigen::Index left() const { return m[0].rows(); }
    Eigen::Index right() const { return m[0].cols(); }
  };

  std::vector<Site> sites;
  int canonical_center = -1;
  std::vector<Eigen::VectorXd> schmidt;  // schmidt[k-1] for bond k; may be empty

  int n_qubits() const { return static_cast<int>(sites.size()); }
  Eigen::Index bond_dim(int k) const { return sites[k - 1].right(); }
  Eigen::Index max_bond() const;
  bool is_real(double tol = 1e-12) const;
};

struct EntanglementProfile {
  std::vector<Eigen::VectorXd> spectra;  // descending, clamped below 1e-14
  Eigen::VectorXd purities;              // p_k = sum Lambda^4
  Eigen::VectorXd entropies;             // S_k = -sum Lambda^2 ln Lambda^2

  void write_csv(std::ostream& os) const;
};

// Left-to-right SVD sweep over the dense vector; keeps at most chi_max values
// per bond and discards the largest tail whose squared weight stays <= eps_svd.
// Output is canonical at bond N-1 with all schmidt vectors populated.
Mps mps_from_vector(const Eigen::VectorXcd& v, Eigen::Index chi_max = 1 << 28,
                    double eps_svd = 0.0);

// Dense statevector of the MPS, big-endian site order. N <= 28.
Eigen::VectorXcd mps_to_vector(const Mps& m);

// Re-gauge to central canonical form at the given bond; populates every
// schmidt vector. The encoded state is unchanged.
Mps canonicalize(const Mps& m, int center);

// Move an existing canonical center to the target bond with single-bond SVD
// steps; cheaper than canonicalize when the target is nearby.
void shift_center(Mps& m, int center);

// Keep the chi largest Schmidt values on every bond (right-to-left sweep),
// renormalize, and re-canonicalize at bond 1.
Mps truncate(const Mps& m, Eigen::Index chi);

// Same with an individual cap per bond (chi_per_bond[k-1] for bond k).
Mps truncate_bonds(const Mps& m, const std::vector<Eigen::Index>& chi_per_bond);

EntanglementProfile entanglement_profile(const Mps& m);

// |<a|b>|^2 via transfer contraction, O(N chi^3).
double fidelity(const Mps& a, const Mps& b);

// <a|b> including phase.
cplx overlap(const Mps& a, const Mps& b);

double mps_norm(const Mps& m);

// Amplitude at one bitstring (bit N-1 of `bits` is s1, the most significant
// scale), O(N chi^2).
cplx mps_amplitude(const Mps& m, std::uint64_t bits);

// Brute-force reduced density matrix of the first k qubits. N <= 16.
Eigen::MatrixXcd reduced_density_matrix(const Eigen::VectorXcd& v, int k);

// Product state |0...0> with N sites.
Mps mps_zero_state(int n_qubits);

}  // namespace mpsenc
