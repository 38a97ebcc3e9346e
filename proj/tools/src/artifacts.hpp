#pragma once

#include <iosfwd>
#include <string>

#include "mpsenc/analytic.hpp"
#include "mpsenc/mps.hpp"
#include "mpsenc/simulate.hpp"

namespace mpsenc::cli {

// MPS artifact as versioned JSON; round-trips exactly (17 significant digits).
void write_mps_json(const Mps& m, std::ostream& os);
Mps read_mps_json(std::istream& is);

// Per-bond closed-form predictions aligned with the numeric profile CSV:
// k, lam0, lam1, lam2, purity, in_window.
void write_prediction_csv(double g1_value, double g2_value, int n_qubits, std::ostream& os);

// Sampled histogram with the ideal (truncated, renormalized) density overlay:
// bitstring, x, count, ideal_pdf.
void write_plotdata_csv(const Histogram& h, const DistributionSpec& dist, std::ostream& os);

// Open for writing or throw with the path in the message.
std::string out_path(const std::string& dir, const std::string& name);

}  // namespace mpsenc::cli
