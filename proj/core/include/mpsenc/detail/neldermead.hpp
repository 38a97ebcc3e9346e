#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace mpsenc::detail {

struct NmResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};

// Deterministic Nelder-Mead over the coordinates listed in active (others stay
// at x0). Returns the best point ever evaluated, so value <= f(x0) always.
NmResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& x0,
                     const std::vector<int>& active,
                     int max_evals,
                     double initial_step = 0.1);

}  // namespace mpsenc::detail
