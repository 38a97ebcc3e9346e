#pragma once

#include <optional>

#include "mpsenc/analytic.hpp"
#include "mpsenc/circuitgen.hpp"
#include "mpsenc/config.hpp"
#include "mpsenc/tci.hpp"

namespace mpsenc::cli {

struct EncodeOutcome {
  Mps mps;
  FunctionOracle oracle;
  Grid grid;
  double g1_value = 0.0;
  double g2_value = 0.0;
  std::optional<TciResult> tci;  // set when builder = "tci"
};

// Discretize + SVD sweep, or cross interpolation, per config.builder.
EncodeOutcome build_mps(const RunConfig& cfg);

BuildOptions build_options(const RunConfig& cfg);

int cmd_encode(const RunConfig& cfg);
int cmd_circuit(const RunConfig& cfg);
int cmd_validate(const RunConfig& cfg);

}  // namespace mpsenc::cli
