#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mpsenc/stats.hpp"

using namespace mpsenc;

TEST_CASE("kl divergence matches hand-computed values") {
  // 0.5 ln(0.5/0.25) + 0.5 ln(0.5/0.75)
  KlResult r = kl_divergence({0.25, 0.75}, {0.5, 0.5});
  CHECK(r.kl == doctest::Approx(0.14384103622589042).epsilon(1e-14));
  CHECK(r.floored_bins == 0);

  // bins with p = 0 contribute nothing, whatever q does there
  KlResult s = kl_divergence({0.5, 0.5, 0.0}, {1.0, 0.0, 0.0});
  CHECK(s.kl == doctest::Approx(0.69314718055994531).epsilon(1e-14));
  CHECK(s.floored_bins == 0);

  // q = 0 under p > 0 hits the 1e-300 floor
  KlResult f = kl_divergence({0.0, 1.0}, {0.5, 0.5});
  CHECK(f.kl == doctest::Approx(344.69461676854691).epsilon(1e-14));
  CHECK(f.floored_bins == 1);

  CHECK(kl_divergence({1.0}, {1.0}).kl == 0.0);
  CHECK_THROWS_AS(kl_divergence({0.5, 0.5}, {1.0}), std::invalid_argument);
}

TEST_CASE("ks statistic and p-value on exactly constructed sample sets") {
  DistributionSpec flat{DistKind::constant, 0.0, 1.0, 1.0, 1.0};

  // staircase 0, .25, .5, .75 against F(x) = x: D = 1/4, sqrt(4) D = 0.5
  KsResult a = ks_test({0.0, 0.25, 0.5, 0.75}, flat);
  CHECK(a.statistic == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(a.p_value == doctest::Approx(0.9639452436648751).epsilon(1e-12));

  // n identical samples at the median give D = 1/2, so sqrt(n)/2 sweeps the
  // Kolmogorov tail through known points
  auto rep = [&](int n) { return ks_test(std::vector<double>(n, 0.5), flat); };
  CHECK(rep(4).statistic == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rep(4).p_value == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(rep(9).p_value == doctest::Approx(0.022217962616525127).epsilon(1e-12));
  CHECK(rep(16).p_value == doctest::Approx(0.0006709252557796953).epsilon(1e-10));
}

TEST_CASE("ks test accepts exact quantiles and rejects a shifted sample") {
  DistributionSpec flat{DistKind::constant, 0.0, 1.0, 1.0, 2.0};
  std::vector<double> mid;
  for (int i = 0; i < 25; ++i) mid.push_back(2.0 * (i + 0.5) / 25.0);
  KsResult good = ks_test(mid, flat);
  CHECK(good.statistic == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(good.p_value == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> squeezed;
  for (int i = 0; i < 100; ++i) squeezed.push_back(1.0 * (i + 0.5) / 100.0);
  KsResult bad = ks_test(squeezed, flat);
  CHECK(bad.statistic == doctest::Approx(0.5).epsilon(0.05));
  CHECK(bad.p_value < 1e-8);
}

TEST_CASE("ks test against the truncated renormalized law") {
  // normal with mu = L/2 on [0, L]: truncated CDF at the mean is exactly 1/2,
  // so n copies of L/2 reproduce the D = 1/2 construction
  DistributionSpec d{DistKind::normal, 0.5, 0.17, 1.0, 1.0};
  KsResult r = ks_test(std::vector<double>(9, 0.5), d);
  CHECK(r.statistic == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.022217962616525127).epsilon(1e-10));

  CHECK_THROWS_AS(ks_test({}, d), std::invalid_argument);
  DistributionSpec far{DistKind::normal, -100.0, 0.1, 1.0, 1.0};
  CHECK_THROWS_AS(ks_test({0.5}, far), std::invalid_argument);
}

TEST_CASE("ks null distribution behaves across seeds") {
  DistributionSpec flat{DistKind::constant, 0.0, 1.0, 1.0, 1.0};
  int pass = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    std::mt19937 gen(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(200);
    for (auto& x : xs) x = u(gen);
    if (ks_test(xs, flat).p_value > 0.05) ++pass;
  }
  CHECK(pass >= 18);  // deterministic draw, measured once and frozen
}

TEST_CASE("validation report serializes all fields and maps nan to null") {
  ValidationReport r;
  r.kl = 0.0025;
  r.kl_floored_bins = 3;
  r.ks_statistic = 0.012;
  r.ks_pvalue = 0.44;
  r.n_samples = 5000;
  r.fidelity = 0.9991;
  r.depth = 25;
  r.cnot_count = 14;
  std::ostringstream os;
  r.write_json(os);
  std::string t = os.str();
  CHECK(t.find("\"kl_divergence\": 0.0025") != std::string::npos);
  CHECK(t.find("\"kl_floored_bins\": 3") != std::string::npos);
  CHECK(t.find("\"kl_log_base\": \"e\"") != std::string::npos);
  CHECK(t.find("\"ks_statistic\": 0.012") != std::string::npos);
  CHECK(t.find("\"ks_test_p_value\": 0.44") != std::string::npos);
  CHECK(t.find("\"n_samples\": 5000") != std::string::npos);
  CHECK(t.find("\"fidelity\": 0.9991") != std::string::npos);
  CHECK(t.find("\"depth\": 25") != std::string::npos);
  CHECK(t.find("\"cnots\": 14") != std::string::npos);

  r.ks_pvalue = std::nan("");
  std::ostringstream os2;
  r.write_json(os2);
  CHECK(os2.str().find("\"ks_test_p_value\": null") != std::string::npos);
}
