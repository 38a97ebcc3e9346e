#pragma once

#include <optional>

#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"

namespace mpsenc {

// h_{n,m} = integral over [0,1] of g^(n) * conj(g^(m)) for the unit-interval
// rescaling g(u) = sqrt(L) f(L u); h[n][m] for n, m <= 2.
struct InnerProducts {
  cplx h[3][3];
};

struct SpectrumPrediction {
  double lam0, lam1, lam2, p;
  bool in_window;  // g1 / 4^k < 1
};

struct EntropyBoundResult {
  bool pass;
  double margin;   // max over checked bonds of S_k / (C k 4^-k)
  int first_bond;  // bond where C was fitted; 0 if no in-window bond
};

cplx inner_h(const FunctionOracle& oracle, double L, int n, int m);
InnerProducts compute_inner_products(const FunctionOracle& oracle, double L);

// Squared norm of f' orthogonal to f (unit-rescaled); clamped at 0 within -1e-9.
double g1(const FunctionOracle& oracle, double L);

// Squared norm of f'' orthogonal to span{f, f'}; rank-revealing Gram elimination.
double g2(const FunctionOracle& oracle, double L);

// Leading three Schmidt values and purity at bond k from g1/g2.
SpectrumPrediction predicted_spectrum(double g1_value, double g2_value, int k);

// rho_{k,m} = gm / (m!^2 4^{km}) * det H_{m+1} / det H_m with H_{nl} = 1/(n+l+1).
double eigenvalue_scaling(double gm, int m, int k);

// Explicit g1 for normal (mu = L/2), log_normal, levy.
double closed_form_g1(const DistributionSpec& dist);

// Explicit g2 for the truncated normal (mu = L/2).
double closed_form_g2_normal(double sigma, double L);

// 1 - F for a single chi=2 layer: geometric tail sum of Lambda_{k,2}^2 from
// k0 = max(m_first, window_start); m_first >= 2 (bond 1 never exceeds chi=2).
double one_layer_infidelity_estimate(double g2_value, int m_first,
                                     std::optional<int> window_start = std::nullopt);

// First bond of the asymptotic validity window, ceil(log2(L / 2 scale)).
int validity_window_start(const DistributionSpec& dist);

// S_k <= C k 4^-k with C fitted at the first in-window bond.
EntropyBoundResult entropy_bound_check(const EntanglementProfile& profile, double g1_value);

}  // namespace mpsenc
