#pragma once

#include <cstdint>

#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"

namespace mpsenc {

struct TciConfig {
  Eigen::Index max_rank = 64;
  double rel_tol = 1e-8;        // target for the sampled mean relative error
  int max_sweeps = 12;
  int n_error_samples = 256;
  std::uint64_t rng_seed = 7;   // drives error-estimate sample points only
};

struct TciErrorEstimate {
  double mean_rel = 0.0;
  double max_rel = 0.0;
};

struct TciResult {
  Mps mps;                        // unit norm, canonical at bond 1
  bool converged = false;         // sampled mean_rel reached rel_tol
  int sweeps = 0;
  std::uint64_t oracle_calls = 0; // distinct grid points evaluated
  TciErrorEstimate error;         // estimate on cfg.n_error_samples points
};

// Cross interpolation of the oracle on the dyadic grid, without materializing
// the 2^N values: alternating sweeps select pivot rows/columns of two-site
// fiber matrices by greedy full-pivot elimination, and bond ranks double per
// sweep (starting at 2) until the sampled error reaches rel_tol or ranks hit
// max_rank. Oracle calls stay below 8 * N * max_rank^2 * sweeps even without
// the internal cache. Deterministic for fixed cfg.
TciResult tci_build(const FunctionOracle& oracle, const Grid& grid, const TciConfig& cfg);

// Relative amplitude error of m against the oracle at n uniformly random grid
// indices (deterministic in seed), after the one global scale that aligns the
// unit-norm MPS with the continuum-normalized oracle.
TciErrorEstimate tci_error_estimate(const Mps& m, const FunctionOracle& oracle, const Grid& grid,
                                    int n, std::uint64_t seed);

}  // namespace mpsenc
