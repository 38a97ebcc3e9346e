#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "mpsenc/detail/specfun.hpp"
#include "mpsenc/stats.hpp"

namespace mpsenc {

KlResult kl_divergence(const std::vector<double>& q, const std::vector<double>& p) {
  if (q.size() != p.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  KlResult r;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    double qi = q[i];
    if (qi < 1e-300) {
      qi = 1e-300;
      ++r.floored_bins;
    }
    r.kl += p[i] * std::log(p[i] / qi);
  }
  return r;
}

KsResult ks_test(const std::vector<double>& samples, const DistributionSpec& dist) {
  if (samples.empty()) throw std::invalid_argument("ks_test: empty sample set");
  const double c0 = distribution_cdf(dist, 0.0);
  const double r2 = distribution_cdf(dist, dist.L) - c0;
  if (!(r2 > 0.0)) throw std::invalid_argument("ks_test: distribution has no mass on [0, L]");

  std::vector<double> xs = samples;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = (distribution_cdf(dist, xs[i]) - c0) / r2;
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  KsResult r;
  r.statistic = d;
  r.p_value = detail::kolmogorov_q(std::sqrt(n) * d);
  return r;
}

void ValidationReport::write_json(std::ostream& os) const {
  nlohmann::json out;
  out["kl_divergence"] = kl;
  out["kl_floored_bins"] = kl_floored_bins;
  out["kl_log_base"] = "e";
  out["ks_statistic"] = ks_statistic;
  out["ks_test_p_value"] = ks_pvalue;
  out["n_samples"] = n_samples;
  out["fidelity"] = fidelity;
  out["depth"] = depth;
  out["cnots"] = cnot_count;
  os << out.dump(2) << '\n';
}

}  // namespace mpsenc
