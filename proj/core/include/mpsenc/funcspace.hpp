#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mpsenc {

using cplx = std::complex<double>;

// Dyadic grid on [0, L): index bits s1..sN map to x = L * sum_i s_i 2^-i,
// with s1 the most significant bit (largest spatial scale).
struct Grid {
  int n_qubits;
  double L;

  Grid(int n, double support_length) : n_qubits(n), L(support_length) {
    if (n < 1 || n > 64) throw std::invalid_argument("Grid: n_qubits must be in [1, 64]");
    if (!(L > 0.0)) throw std::invalid_argument("Grid: support length must be positive");
  }

  double step() const { return L * std::ldexp(1.0, -n_qubits); }

  std::uint64_t size_log2() const { return static_cast<std::uint64_t>(n_qubits); }

  double x_of_index(std::uint64_t j) const {
    // for n_qubits > 53 the double mantissa rounds the last bits; fine for smooth oracles
    return L * std::ldexp(static_cast<double>(j), -n_qubits);
  }
};

struct FunctionOracle {
  std::function<cplx(double)> eval;
  std::function<cplx(double)> deriv1;  // optional
  std::function<cplx(double)> deriv2;  // optional
  bool is_real = false;
};

enum class DistKind { normal, log_normal, levy, gamma, sin_test, exp_test, constant };

struct DistributionSpec {
  DistKind kind = DistKind::normal;
  double mu = 0.0;     // location (normal, log_normal)
  double scale = 1.0;  // sigma / c / theta / exp rate
  double shape = 1.0;  // gamma k
  double L = 1.0;

  static DistKind kind_from_string(const std::string& s);
  static std::string kind_to_string(DistKind k);
};

// Untruncated pdf / cdf of the named law at x (cdf accurate to ~1e-12).
double distribution_pdf(const DistributionSpec& dist, double x);
double distribution_cdf(const DistributionSpec& dist, double x);

// Oracle for sqrt(p(x) / R^2) with R^2 = cdf(L) - cdf(0); analytic derivatives attached.
FunctionOracle sqrt_pdf_oracle(const DistributionSpec& dist);

// Evaluate the oracle on every grid point (big-endian in s1..sN) and rescale
// to unit Euclidean norm. Dense path, N <= 28.
Eigen::VectorXcd discretize(const FunctionOracle& oracle, const Grid& grid);

// 5-point central stencils used when an oracle lacks analytic derivatives.
cplx stencil_deriv1(const std::function<cplx(double)>& f, double x, double h);
cplx stencil_deriv2(const std::function<cplx(double)>& f, double x, double h);

}  // namespace mpsenc
