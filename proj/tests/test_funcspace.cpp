#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mpsenc/funcspace.hpp"

using namespace mpsenc;

TEST_CASE("grid maps index to left cell endpoint") {
  Grid g(3, 4.0);
  CHECK(g.step() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.x_of_index(0) == 0.0);
  CHECK(g.x_of_index(5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(g.x_of_index(7) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK_THROWS_AS(Grid(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(65, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(4, 0.0), std::invalid_argument);
}

TEST_CASE("distribution kind strings round-trip") {
  for (auto k : {DistKind::normal, DistKind::log_normal, DistKind::levy, DistKind::gamma,
                 DistKind::sin_test, DistKind::exp_test, DistKind::constant}) {
    CHECK(DistributionSpec::kind_from_string(DistributionSpec::kind_to_string(k)) == k);
  }
  CHECK_THROWS_AS(DistributionSpec::kind_from_string("cauchy"), std::invalid_argument);
}

TEST_CASE("sqrt_pdf_oracle squares to the renormalized truncated density") {
  DistributionSpec cases[] = {
      {DistKind::normal, 0.5, 0.2, 1.0, 1.0},
      {DistKind::log_normal, -1.5, 0.4, 1.0, 1.0},
      {DistKind::levy, 0.0, 0.5, 1.0, 1.0},
      {DistKind::gamma, 0.0, 0.1, 2.0, 1.0},
  };
  for (const auto& d : cases) {
    FunctionOracle o = sqrt_pdf_oracle(d);
    double r2 = distribution_cdf(d, d.L) - distribution_cdf(d, 0.0);
    for (double x : {0.11, 0.43, 0.77}) {
      double f = std::abs(o.eval(x));
      CHECK(f * f == doctest::Approx(distribution_pdf(d, x) / r2).epsilon(1e-12));
    }
    // Riemann sum of f^2 over the support converges to 1.
    int n = 1 << 14;
    double s = 0.0, h = d.L / n;
    for (int j = 0; j < n; ++j) {
      double f = std::abs(o.eval(d.L * (j + 0.5) / n));
      s += f * f * h;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("oracle analytic derivatives match stencils") {
  DistributionSpec cases[] = {
      {DistKind::normal, 0.5, 0.15, 1.0, 1.0},
      {DistKind::log_normal, -1.8, 0.45, 1.0, 1.0},
      {DistKind::levy, 0.0, 1.0, 1.0, 1.0},
      {DistKind::gamma, 0.0, 0.15, 3.0, 1.0},
  };
  for (const auto& d : cases) {
    FunctionOracle o = sqrt_pdf_oracle(d);
    REQUIRE(o.deriv1);
    REQUIRE(o.deriv2);
    for (double x : {0.21, 0.52, 0.83}) {
      cplx d1 = stencil_deriv1(o.eval, x, 1e-5);
      cplx d2 = stencil_deriv2(o.eval, x, 1e-4);
      CHECK(std::abs(o.deriv1(x) - d1) <= 1e-6 * (1.0 + std::abs(d1)));
      CHECK(std::abs(o.deriv2(x) - d2) <= 1e-4 * (1.0 + std::abs(d2)));
    }
  }
}

TEST_CASE("discretize yields a unit vector proportional to oracle samples") {
  DistributionSpec d{DistKind::normal, 0.5, 0.1, 1.0, 1.0};
  Grid g(12, d.L);
  FunctionOracle o = sqrt_pdf_oracle(d);
  Eigen::VectorXcd v = discretize(o, g);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-13));
  // amplitude ratios equal oracle ratios
  double a = std::abs(v(1024)), b = std::abs(v(3000));
  double fa = std::abs(o.eval(g.x_of_index(1024))), fb = std::abs(o.eval(g.x_of_index(3000)));
  CHECK(a / b == doctest::Approx(fa / fb).epsilon(1e-12));
  CHECK_THROWS_AS(discretize(o, Grid(29, 1.0)), std::invalid_argument);
}

TEST_CASE("gamma with shape 1 is the exponential law") {
  DistributionSpec gm{DistKind::gamma, 0.0, 0.25, 1.0, 1.0};
  for (double x : {0.0, 0.1, 0.6, 1.0}) {
    CHECK(distribution_pdf(gm, x) ==
          doctest::Approx(std::exp(-x / 0.25) / 0.25).epsilon(1e-13));
    CHECK(distribution_cdf(gm, x) == doctest::Approx(1.0 - std::exp(-x / 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("cdf is consistent with the pdf") {
  DistributionSpec cases[] = {
      {DistKind::levy, 0.0, 0.3, 1.0, 1.0},
      {DistKind::gamma, 0.0, 0.2, 2.5, 1.0},
      {DistKind::log_normal, -1.2, 0.5, 1.0, 1.0},
  };
  for (const auto& d : cases) {
    // midpoint rule on [a, b] against cdf differences
    double a = 0.2, b = 0.7;
    int n = 20000;
    double s = 0.0, h = (b - a) / n;
    for (int j = 0; j < n; ++j) s += distribution_pdf(d, a + (j + 0.5) * h) * h;
    CHECK(s == doctest::Approx(distribution_cdf(d, b) - distribution_cdf(d, a)).epsilon(1e-7));
  }
}

TEST_CASE("half-normal arises from a zero-mean normal truncated to x >= 0") {
  DistributionSpec d{DistKind::normal, 0.0, 1.0, 1.0, 16.0};
  FunctionOracle o = sqrt_pdf_oracle(d);
  // renormalized density is 2 * phi(x) up to the tiny mass beyond L = 16
  double f0 = std::abs(o.eval(0.5));
  double expect = std::sqrt(2.0 * std::exp(-0.125) / std::sqrt(2.0 * M_PI));
  CHECK(f0 == doctest::Approx(expect).epsilon(1e-10));
}
