#pragma once

#include <functional>

namespace mpsenc::detail {

// Adaptive composite Gauss-Legendre quadrature on [a, b].
// Doubles the panel count until successive estimates agree to abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10);

}  // namespace mpsenc::detail
