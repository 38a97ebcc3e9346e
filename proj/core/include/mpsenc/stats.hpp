#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mpsenc/funcspace.hpp"

namespace mpsenc {

struct KlResult {
  double kl = 0.0;
  int floored_bins = 0;  // bins with p > 0 where q hit the 1e-300 floor
};

// Sum over bins with p_i > 0 of p_i ln(p_i / q_i) (natural log); q is the
// encoded distribution, p the ideal one.
KlResult kl_divergence(const std::vector<double>& q, const std::vector<double>& p);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test of x samples against the truncated and
// renormalized CDF (cdf(x) - cdf(0)) / (cdf(L) - cdf(0)); p-value from the
// asymptotic Kolmogorov distribution at sqrt(n) * statistic.
KsResult ks_test(const std::vector<double>& samples, const DistributionSpec& dist);

struct ValidationReport {
  double kl = 0.0;
  int kl_floored_bins = 0;
  double ks_statistic = 0.0;
  double ks_pvalue = 0.0;
  std::int64_t n_samples = 0;
  double fidelity = 0.0;
  int depth = 0;
  int cnot_count = 0;

  void write_json(std::ostream& os) const;
};

}  // namespace mpsenc
