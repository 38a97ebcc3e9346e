#include "mpsenc/mps.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mpsenc/detail/linalg.hpp"

namespace mpsenc {

using detail::svd_fixed;
using detail::SvdResult;
using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Index Mps::max_bond() const {
  Eigen::Index b = 1;
  for (const auto& s : sites) b = std::max(b, s.right());
  return b;
}

bool Mps::is_real(double tol) const {
  for (const auto& s : sites)
    for (int p = 0; p < 2; ++p)
      if (s.m[p].size() > 0 && s.m[p].imag().cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

namespace {

// Site tensor with center weights absorbed into the site right of the bond.
Mps::Site effective_site(const Mps& m, int k) {
  Mps::Site s = m.sites[k];
  if (m.canonical_center >= 1 && k == m.canonical_center) {
    const Eigen::VectorXd& lam = m.schmidt[m.canonical_center - 1];
    for (int p = 0; p < 2; ++p) s.m[p] = lam.asDiagonal() * s.m[p];
  }
  return s;
}

Eigen::Index truncated_rank(const Eigen::VectorXd& s, Eigen::Index chi_max, double eps) {
  Eigen::Index r = s.size();
  double acc = 0.0;
  while (r > 1 && acc + s(r - 1) * s(r - 1) <= eps) {
    acc += s(r - 1) * s(r - 1);
    --r;
  }
  return std::min(r, chi_max);
}

// Move canonical center one bond to the left (c -> c-1), recomputing schmidt[c-2].
void move_center_left(Mps& m) {
  int c = m.canonical_center;
  if (c < 2) throw std::logic_error("move_center_left: already at bond 1");
  Mps::Site t = m.sites[c - 1];  // site left of bond c
  const Eigen::VectorXd& lam = m.schmidt[c - 1];
  for (int p = 0; p < 2; ++p) t.m[p] = t.m[p] * lam.asDiagonal();

  Eigen::Index chi_l = t.left(), chi_r = t.right();
  Eigen::MatrixXcd mat(chi_l, 2 * chi_r);
  mat.leftCols(chi_r) = t.m[0];
  mat.rightCols(chi_r) = t.m[1];
  SvdResult sv = svd_fixed(mat);
  Eigen::Index r = sv.s.size();

  m.schmidt[c - 2] = sv.s;
  Eigen::MatrixXcd vh = sv.v.adjoint();  // r x 2chi_r
  m.sites[c - 1].m[0] = vh.leftCols(chi_r);
  m.sites[c - 1].m[1] = vh.rightCols(chi_r);
  for (int p = 0; p < 2; ++p) m.sites[c - 2].m[p] = m.sites[c - 2].m[p] * sv.u.leftCols(r);
  m.canonical_center = c - 1;
}

// Move canonical center one bond to the right (c -> c+1), recomputing schmidt[c].
void move_center_right(Mps& m) {
  int c = m.canonical_center;
  if (c < 1 || c > m.n_qubits() - 2) throw std::logic_error("move_center_right: already at last bond");
  Mps::Site t = m.sites[c];  // site right of bond c
  const Eigen::VectorXd& lam = m.schmidt[c - 1];
  for (int p = 0; p < 2; ++p) t.m[p] = lam.asDiagonal() * t.m[p];

  Eigen::Index chi_l = t.left(), chi_r = t.right();
  Eigen::MatrixXcd mat(2 * chi_l, chi_r);
  for (Eigen::Index l = 0; l < chi_l; ++l) {
    mat.row(2 * l) = t.m[0].row(l);
    mat.row(2 * l + 1) = t.m[1].row(l);
  }
  SvdResult sv = svd_fixed(mat);
  Eigen::Index r = sv.s.size();

  m.schmidt[c] = sv.s;
  m.sites[c].m[0].resize(chi_l, r);
  m.sites[c].m[1].resize(chi_l, r);
  for (Eigen::Index l = 0; l < chi_l; ++l) {
    m.sites[c].m[0].row(l) = sv.u.row(2 * l);
    m.sites[c].m[1].row(l) = sv.u.row(2 * l + 1);
  }
  Eigen::MatrixXcd vh = sv.v.adjoint();
  for (int p = 0; p < 2; ++p) m.sites[c + 1].m[p] = vh * m.sites[c + 1].m[p];
  m.canonical_center = c + 1;
}

}  // namespace

Mps mps_from_vector(const Eigen::VectorXcd& v, Eigen::Index chi_max, double eps_svd) {
  Eigen::Index sz = v.size();
  int n = 0;
  while ((Eigen::Index(1) << n) < sz) ++n;
  if ((Eigen::Index(1) << n) != sz || n < 1 || n > 28)
    throw std::invalid_argument("mps_from_vector: length must be 2^N with 1 <= N <= 28");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("mps_from_vector: input must be unit norm");

  Mps out;
  out.sites.resize(n);
  if (n == 1) {
    out.sites[0].m[0] = Eigen::MatrixXcd::Constant(1, 1, v(0));
    out.sites[0].m[1] = Eigen::MatrixXcd::Constant(1, 1, v(1));
    return out;
  }
  out.schmidt.resize(n - 1);

  std::vector<cplx> buf(v.data(), v.data() + sz);
  Eigen::Index chi = 1;
  Eigen::Index cols = sz;
  for (int k = 1; k <= n - 1; ++k) {
    Eigen::Index rows = 2 * chi;
    cols /= 2;
    Eigen::Map<RowMat> mat(buf.data(), rows, cols);
    SvdResult sv = svd_fixed(mat);
    Eigen::Index r = truncated_rank(sv.s, chi_max, eps_svd);
    Eigen::VectorXd s = sv.s.head(r);
    s /= s.norm();  // keep the represented state unit norm after any discard

    out.sites[k - 1].m[0].resize(chi, r);
    out.sites[k - 1].m[1].resize(chi, r);
    for (Eigen::Index l = 0; l < chi; ++l) {
      out.sites[k - 1].m[0].row(l) = sv.u.row(2 * l).head(r);
      out.sites[k - 1].m[1].row(l) = sv.u.row(2 * l + 1).head(r);
    }
    out.schmidt[k - 1] = s;

    if (k == n - 1) {
      Eigen::MatrixXcd vh = sv.v.leftCols(r).adjoint();  // r x 2
      out.sites[n - 1].m[0] = vh.col(0);
      out.sites[n - 1].m[1] = vh.col(1);
    } else {
      Eigen::MatrixXcd rest = s.asDiagonal() * sv.v.leftCols(r).adjoint();  // r x cols
      Eigen::Map<RowMat>(buf.data(), r, cols) = rest;
    }
    chi = r;
  }
  out.canonical_center = n - 1;
  return out;
}

Eigen::VectorXcd mps_to_vector(const Mps& m) {
  int n = m.n_qubits();
  if (n > 28) throw std::invalid_argument("mps_to_vector: limited to 28 qubits");
  // accumulate as (2^k x chi) matrix, row index big-endian in the first k bits
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    Mps::Site s = effective_site(m, k);
    Eigen::MatrixXcd next(acc.rows() * 2, s.right());
    for (int p = 0; p < 2; ++p) {
      Eigen::MatrixXcd part = acc * s.m[p];  // 2^k x chi_r
      for (Eigen::Index i = 0; i < acc.rows(); ++i) next.row(2 * i + p) = part.row(i);
    }
    acc = std::move(next);
  }
  return acc.col(0);
}

void shift_center(Mps& m, int center) {
  if (center < 1 || center > m.n_qubits() - 1) throw std::invalid_argument("shift_center: bad bond");
  if (m.canonical_center < 1) throw std::invalid_argument("shift_center: state not canonical");
  while (m.canonical_center > center) move_center_left(m);
  while (m.canonical_center < center) move_center_right(m);
}

Mps canonicalize(const Mps& m, int center) {
  int n = m.n_qubits();
  if (n == 1) return m;
  if (center < 1 || center > n - 1) throw std::invalid_argument("canonicalize: bad center bond");

  // right-to-left sweep: make sites 1..N-1 right isometries
  Mps work = m;
  work.canonical_center = -1;
  {
    Mps::Site last = effective_site(m, n - 1);
    work.sites[n - 1] = last;
    for (int k = 0; k < n - 1; ++k) work.sites[k] = effective_site(m, k);
  }
  for (int k = n - 1; k >= 1; --k) {
    Mps::Site& t = work.sites[k];
    Eigen::Index chi_l = t.left(), chi_r = t.right();
    Eigen::MatrixXcd mat(chi_l, 2 * chi_r);
    mat.leftCols(chi_r) = t.m[0];
    mat.rightCols(chi_r) = t.m[1];
    SvdResult sv = svd_fixed(mat);
    Eigen::Index r = sv.s.size();
    Eigen::MatrixXcd vh = sv.v.adjoint();
    t.m[0] = vh.leftCols(chi_r);
    t.m[1] = vh.rightCols(chi_r);
    Eigen::MatrixXcd carry = sv.u.leftCols(r) * sv.s.asDiagonal();
    for (int p = 0; p < 2; ++p) work.sites[k - 1].m[p] = work.sites[k - 1].m[p] * carry;
  }

  // left-to-right sweep collecting every schmidt vector; land center at N-1
  work.schmidt.assign(n - 1, Eigen::VectorXd());
  Mps::Site cur = work.sites[0];
  for (int k = 0; k <= n - 2; ++k) {
    Eigen::Index chi_l = cur.left(), chi_r = cur.right();
    Eigen::MatrixXcd mat(2 * chi_l, chi_r);
    for (Eigen::Index l = 0; l < chi_l; ++l) {
      mat.row(2 * l) = cur.m[0].row(l);
      mat.row(2 * l + 1) = cur.m[1].row(l);
    }
    SvdResult sv = svd_fixed(mat);
    Eigen::Index r = sv.s.size();
    work.sites[k].m[0].resize(chi_l, r);
    work.sites[k].m[1].resize(chi_l, r);
    for (Eigen::Index l = 0; l < chi_l; ++l) {
      work.sites[k].m[0].row(l) = sv.u.row(2 * l);
      work.sites[k].m[1].row(l) = sv.u.row(2 * l + 1);
    }
    work.schmidt[k] = sv.s;
    if (k == n - 2) {
      Eigen::MatrixXcd vh = sv.v.adjoint();  // r x chi_r, unitary rows
      for (int p = 0; p < 2; ++p) work.sites[n - 1].m[p] = vh * work.sites[n - 1].m[p];
    } else {
      Eigen::MatrixXcd carry = sv.s.asDiagonal() * sv.v.adjoint();
      cur.m[0] = carry * work.sites[k + 1].m[0];
      cur.m[1] = carry * work.sites[k + 1].m[1];
    }
  }
  work.canonical_center = n - 1;

  while (work.canonical_center > center) move_center_left(work);
  return work;
}

Mps truncate_bonds(const Mps& m, const std::vector<Eigen::Index>& chi_per_bond) {
  int n = m.n_qubits();
  if (n == 1) return m;
  if (static_cast<int>(chi_per_bond.size()) != n - 1)
    throw std::invalid_argument("truncate_bonds: need one cap per bond");

  Mps work = canonicalize(m, n - 1);
  for (int c = n - 1; c >= 1; --c) {
    Eigen::Index cap = chi_per_bond[c - 1];
    if (cap < 1) throw std::invalid_argument("truncate_bonds: caps must be >= 1");
    if (work.schmidt[c - 1].size() > cap) {
      work.schmidt[c - 1] = work.schmidt[c - 1].head(cap).eval();
      for (int p = 0; p < 2; ++p) {
        work.sites[c - 1].m[p] = work.sites[c - 1].m[p].leftCols(cap).eval();
        work.sites[c].m[p] = work.sites[c].m[p].topRows(cap).eval();
      }
    }
    if (c > 1) move_center_left(work);
  }
  double nrm = work.schmidt[0].norm();
  if (!(nrm > 0.0)) throw std::runtime_error("truncate_bonds: state collapsed to zero");
  work.schmidt[0] /= nrm;
  return canonicalize(work, 1);
}

Mps truncate(const Mps& m, Eigen::Index chi) {
  std::vector<Eigen::Index> caps(std::max(m.n_qubits() - 1, 0), chi);
  return truncate_bonds(m, caps);
}

EntanglementProfile entanglement_profile(const Mps& m) {
  int n = m.n_qubits();
  if (static_cast<int>(m.schmidt.size()) != n - 1)
    throw std::invalid_argument("entanglement_profile: schmidt vectors not populated");
  EntanglementProfile prof;
  prof.spectra.resize(n - 1);
  prof.purities.resize(n - 1);
  prof.entropies.resize(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    Eigen::VectorXd lam = m.schmidt[k];
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam(i) < 1e-14) lam(i) = 0.0;
    double p = 0.0, s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      double l2 = lam(i) * lam(i);
      p += l2 * l2;
      if (l2 > 0.0) s -= l2 * std::log(l2);
    }
    prof.spectra[k] = lam;
    prof.purities(k) = p;
    prof.entropies(k) = s;
  }
  return prof;
}

void EntanglementProfile::write_csv(std::ostream& os) const {
  os.precision(17);
  os << "bond k,i,Lambda_ki,p_k,S_k\n";
  for (std::size_t k = 0; k < spectra.size(); ++k)
    for (Eigen::Index i = 0; i < spectra[k].size(); ++i)
      os << (k + 1) << ',' << i << ',' << spectra[k](i) << ',' << purities(k) << ','
         << entropies(k) << '\n';
}

cplx overlap(const Mps& a, const Mps& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("overlap: qubit count mismatch");
  Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
  for (int k = 0; k < a.n_qubits(); ++k) {
    Mps::Site sa = effective_site(a, k);
    Mps::Site sb = effective_site(b, k);
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(sa.right(), sb.right());
    for (int p = 0; p < 2; ++p) next += sa.m[p].adjoint() * env * sb.m[p];
    env = std::move(next);
  }
  return env(0, 0);
}

double fidelity(const Mps& a, const Mps& b) {
  return std::min(std::norm(overlap(a, b)), 1.0);
}

double mps_norm(const Mps& m) {
  double n2 = std::abs(overlap(m, m).real());
  return std::sqrt(n2);
}

cplx mps_amplitude(const Mps& m, std::uint64_t bits) {
  int n = m.n_qubits();
  Eigen::RowVectorXcd env = Eigen::RowVectorXcd::Ones(1);
  for (int k = 0; k < n; ++k) {
    int s = static_cast<int>((bits >> (n - 1 - k)) & 1ull);
    env = env * effective_site(m, k).m[s];
  }
  return env(0);
}

Eigen::MatrixXcd reduced_density_matrix(const Eigen::VectorXcd& v, int k) {
  Eigen::Index sz = v.size();
  int n = 0;
  while ((Eigen::Index(1) << n) < sz) ++n;
  if ((Eigen::Index(1) << n) != sz || n > 16)
    throw std::invalid_argument("reduced_density_matrix: need length 2^N, N <= 16");
  if (k < 1 || k > n) throw std::invalid_argument("reduced_density_matrix: bad cut");
  Eigen::Index rows = Eigen::Index(1) << k;
  Eigen::Index cols = sz / rows;
  Eigen::Map<const RowMat> mat(v.data(), rows, cols);
  return mat * mat.adjoint();
}

Mps mps_zero_state(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("mps_zero_state: need at least one qubit");
  Mps m;
  m.sites.resize(n_qubits);
  for (auto& s : m.sites) {
    s.m[0] = Eigen::MatrixXcd::Ones(1, 1);
    s.m[1] = Eigen::MatrixXcd::Zero(1, 1);
  }
  m.schmidt.assign(std::max(n_qubits - 1, 0), Eigen::VectorXd::Ones(1));
  if (n_qubits >= 2) m.canonical_center = 1;
  return m;
}

}  // namespace mpsenc
