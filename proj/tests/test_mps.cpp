#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mpsenc/funcspace.hpp"
#include "mpsenc/mps.hpp"

using namespace mpsenc;

namespace {

Eigen::VectorXcd random_state(int n_qubits, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(Eigen::Index(1) << n_qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  v /= v.norm();
  return v;
}

}  // namespace

TEST_CASE("mps_from_vector reproduces every amplitude") {
  const int n = 8;
  Eigen::VectorXcd v = random_state(n, 11);
  Mps m = mps_from_vector(v);
  for (std::uint64_t j = 0; j < (1u << n); ++j) {
    CHECK(std::abs(mps_amplitude(m, j) - v(Eigen::Index(j))) <= 1e-12);
  }
  Eigen::VectorXcd back = mps_to_vector(m);
  CHECK((back - v).norm() <= 1e-12);
}

TEST_CASE("canonical form exposes isometries on both sides of the center") {
  const int n = 7;
  Mps m = mps_from_vector(random_state(n, 5));
  for (int center : {1, 3, n - 1}) {
    Mps c = canonicalize(m, center);
    CHECK(c.canonical_center == center);
    // sites left of the center are left isometries, sites right of it right isometries
    for (int s = 1; s < center; ++s) {
      const auto& site = c.sites[static_cast<std::size_t>(s - 1)];
      Eigen::MatrixXcd acc = site.m[0].adjoint() * site.m[0] + site.m[1].adjoint() * site.m[1];
      CHECK((acc - Eigen::MatrixXcd::Identity(acc.rows(), acc.cols())).norm() <= 1e-10);
    }
    for (int s = center + 1; s <= n; ++s) {
      const auto& site = c.sites[static_cast<std::size_t>(s - 1)];
      Eigen::MatrixXcd acc = site.m[0] * site.m[0].adjoint() + site.m[1] * site.m[1].adjoint();
      CHECK((acc - Eigen::MatrixXcd::Identity(acc.rows(), acc.cols())).norm() <= 1e-10);
    }
    // amplitudes unchanged by the gauge move
    for (std::uint64_t j : {0ull, 17ull, 100ull, 127ull}) {
      CHECK(std::abs(mps_amplitude(c, j) - mps_amplitude(m, j)) <= 1e-12);
    }
  }
}

TEST_CASE("schmidt spectra are descending and normalized") {
  Mps m = canonicalize(mps_from_vector(random_state(9, 23)), 1);
  REQUIRE(m.schmidt.size() == 8);
  for (const auto& lam : m.schmidt) {
    double s2 = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      s2 += lam(i) * lam(i);
      if (i > 0) CHECK(lam(i) <= lam(i - 1) + 1e-15);
    }
    CHECK(s2 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("schmidt squares equal reduced-density eigenvalues") {
  const int n = 10;
  Eigen::VectorXcd v = random_state(n, 77);
  Mps m = canonicalize(mps_from_vector(v), 1);
  for (int k : {2, 4, 7}) {
    Eigen::MatrixXcd rho = reduced_density_matrix(v, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    Eigen::VectorXd w = es.eigenvalues().reverse();  // descending
    const auto& lam = m.schmidt[static_cast<std::size_t>(k - 1)];
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      CHECK(std::abs(lam(i) * lam(i) - w(i)) <= 1e-9);
    }
  }
}

TEST_CASE("truncate caps ranks and renormalizes") {
  DistributionSpec d{DistKind::normal, 0.5, 0.08, 1.0, 1.0};
  Grid g(10, d.L);
  Eigen::VectorXcd v = discretize(sqrt_pdf_oracle(d), g);
  Mps m = mps_from_vector(v);
  Mps t = truncate(m, 2);
  CHECK(t.max_bond() <= 2);
  CHECK(mps_norm(t) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.canonical_center == 1);
  // fidelity against the full state dominated by the discarded tail
  double tail = 0.0;
  Mps c = canonicalize(m, 1);
  for (const auto& lam : c.schmidt)
    for (Eigen::Index i = 2; i < lam.size(); ++i) tail += lam(i) * lam(i);
  double f = fidelity(m, t);
  CHECK(1.0 - f <= 3.0 * tail + 1e-14);
  CHECK(f <= 1.0 + 1e-12);
}

TEST_CASE("truncate_bonds honors a per-bond cap") {
  Mps m = mps_from_vector(random_state(8, 3));
  std::vector<Eigen::Index> caps(7, 64);
  caps[3] = 1;  // cut the middle bond to a product split
  Mps t = truncate_bonds(m, caps);
  CHECK(t.bond_dim(4) == 1);
  CHECK(mps_norm(t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entanglement profile matches its schmidt data") {
  Mps m = canonicalize(mps_from_vector(random_state(8, 41)), 1);
  EntanglementProfile pr = entanglement_profile(m);
  REQUIRE(pr.spectra.size() == 7);
  for (std::size_t b = 0; b < pr.spectra.size(); ++b) {
    const auto& lam = pr.spectra[b];
    double p = 0.0, s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      double l2 = lam(i) * lam(i);
      p += l2 * l2;
      if (l2 > 0.0) s -= l2 * std::log(l2);
    }
    CHECK(pr.purities[b] == doctest::Approx(p).epsilon(1e-12));
    CHECK(pr.entropies[b] == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("product state has zero entropy and unit purity") {
  Mps z = mps_zero_state(6);
  EntanglementProfile pr = entanglement_profile(z);
  for (std::size_t b = 0; b < pr.purities.size(); ++b) {
    CHECK(pr.purities[b] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pr.entropies[b] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("profile csv has the documented header and row count") {
  Mps m = canonicalize(mps_from_vector(random_state(4, 2)), 1);
  EntanglementProfile pr = entanglement_profile(m);
  std::ostringstream os;
  pr.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "bond k,i,Lambda_ki,p_k,S_k");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  int expect = 0;
  for (const auto& lam : pr.spectra) expect += static_cast<int>(lam.size());
  CHECK(rows == expect);
}

TEST_CASE("sin half-period state has rank 2 up to rounding noise") {
  DistributionSpec d{DistKind::sin_test, 0.0, 1.0, 1.0, 1.0};
  Grid g(16, d.L);
  Mps m = canonicalize(mps_from_vector(discretize(sqrt_pdf_oracle(d), g)), 1);
  // the SVD keeps numerically nonzero tail values, but all weight past the
  // second level is rounding noise at every bond
  for (const auto& lam : m.schmidt) {
    double tail = 0.0;
    for (Eigen::Index i = 2; i < lam.size(); ++i) tail += lam(i) * lam(i);
    CHECK(tail <= 1e-24);
  }
  // closed form for the eigenvalues of the bond-k cut, exact up to O(4^-N)
  int k = 6;
  const auto& lam = m.schmidt[static_cast<std::size_t>(k - 1)];
  double t = std::ldexp(1.0, k) / (2.0 * M_PI) * std::sin(M_PI * std::ldexp(1.0, -k));
  CHECK(std::abs(lam(0) * lam(0) - (0.5 + t)) <= 1e-9);
  CHECK(std::abs(lam(1) * lam(1) - (0.5 - t)) <= 1e-9);
}
