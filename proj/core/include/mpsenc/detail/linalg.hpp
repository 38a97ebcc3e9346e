#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <array>
#include <complex>
#include <stdexcept>

namespace mpsenc::detail {

using cplx = std::complex<double>;

struct SvdResult {
  Eigen::MatrixXcd u;   // m x r, columns left singular vectors
  Eigen::VectorXd s;    // r, descending
  Eigen::MatrixXcd v;   // n x r, columns right singular vectors (A = u * diag(s) * v^H)
};

// Thin SVD with a fixed gauge: in each left singular vector the entry of
// largest magnitude is made real and positive (ties resolved by the lowest
// row index), and the matching right vector absorbs the conjugate phase.
// Jacobi for small matrices, divide-and-conquer above that.
inline SvdResult svd_fixed(const Eigen::MatrixXcd& a) {
  SvdResult r;
  if (std::min(a.rows(), a.cols()) <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r = SvdResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r = SvdResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  for (Eigen::Index j = 0; j < r.u.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < r.u.rows(); ++i) {
      double m = std::abs(r.u(i, j));
      if (m > best + 1e-15) { best = m; imax = i; }
    }
    cplx z = r.u(imax, j);
    if (std::abs(z) == 0.0) continue;
    cplx ph = std::conj(z) / std::abs(z);
    r.u.col(j) *= ph;
    r.v.col(j) *= ph;
  }
  return r;
}

// Hermitian eigendecomposition, eigenvalues descending.
inline void eigh_desc(const Eigen::MatrixXcd& h, Eigen::VectorXd& w, Eigen::MatrixXcd& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Eigen::Index n = h.rows();
  w.resize(n);
  v.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = es.eigenvalues()(n - 1 - i);
    v.col(i) = es.eigenvectors().col(n - 1 - i);
  }
}

inline Eigen::MatrixXcd kron2(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Nearest orthogonal matrix to the real part of m (polar factor).
inline Eigen::Matrix2d polar_o2(const Eigen::Matrix2cd& m) {
  Eigen::Matrix2d re = m.real();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(re, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

inline bool is_so2(const Eigen::Matrix2cd& m, double tol = 1e-7) {
  if (m.imag().norm() > tol) return false;
  if ((m * m.adjoint() - Eigen::Matrix2cd::Identity()).norm() > tol) return false;
  return m.determinant().real() > 0.0;
}

// Angles (gamma, beta, alpha) with u proportional to RZ(alpha) RY(beta) RZ(gamma).
inline std::array<double, 3> zyz_angles(const Eigen::Matrix2cd& u) {
  Eigen::Matrix2cd v = u / std::sqrt(u.determinant());
  double beta = 2.0 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
  double a10 = std::arg(v(1, 0));
  double a00 = std::arg(v(0, 0));
  return {-a10 - a00, beta, a10 - a00};
}

}  // namespace mpsenc::detail
