#pragma once

#include <cstdint>
#include <string>

#include "mpsenc/funcspace.hpp"
#include "mpsenc/tci.hpp"

namespace mpsenc {

// Full pipeline description; serializes to versioned JSON. Parsing rejects
// unknown fields and re-serialization round-trips losslessly.
struct RunConfig {
  int schema_version = 1;
  DistributionSpec dist;
  int n_qubits = 10;
  std::string builder = "svd";         // "svd" or "tci"
  TciConfig tci;
  int n_layers = 2;
  std::string origin_policy = "scan";  // "scan" or "fixed"
  int origin = -1;                     // bond index when origin_policy = "fixed"
  double eps_trunc = 0.0;
  int chi_sim = 64;
  std::int64_t shots = 5000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& c);

// Throws invalid_argument on any out-of-range field combination.
void validate_config(const RunConfig& c);

}  // namespace mpsenc
