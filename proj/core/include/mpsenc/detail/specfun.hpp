#pragma once

namespace mpsenc::detail {

// Standard normal CDF via erfc, accurate in both tails.
double norm_cdf(double z);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Upper incomplete gamma Gamma(a, x) (unregularized).
double gamma_upper(double a, double x);

// Survival function of the Kolmogorov distribution, Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

}  // namespace mpsenc::detail
