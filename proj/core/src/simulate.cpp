#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "mpsenc/detail/linalg.hpp"
#include "mpsenc/detail/rng.hpp"
#include "mpsenc/simulate.hpp"

namespace mpsenc {
namespace {

// qubit q holds bit n-1-q of the grid index
std::uint64_t qubit_mask(int n, int q) { return std::uint64_t(1) << (n - 1 - q); }

void dense_1q(Eigen::VectorXcd& v, int n, int q, const Eigen::Matrix2cd& u) {
  const std::uint64_t m = qubit_mask(n, q);
  const std::uint64_t size = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t i = 0; i < size; ++i) {
    if (i & m) continue;
    cplx a0 = v(i), a1 = v(i | m);
    v(i) = u(0, 0) * a0 + u(0, 1) * a1;
    v(i | m) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void dense_cnot(Eigen::VectorXcd& v, int n, int qc, int qt) {
  const std::uint64_t mc = qubit_mask(n, qc), mt = qubit_mask(n, qt);
  const std::uint64_t size = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t i = 0; i < size; ++i)
    if ((i & mc) && !(i & mt)) std::swap(v(i), v(i | mt));
}

void dense_u2q(Eigen::VectorXcd& v, int n, const Gate& g) {
  const std::uint64_t m0 = qubit_mask(n, g.q0), m1 = qubit_mask(n, g.q1);
  const std::uint64_t size = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t i = 0; i < size; ++i) {
    if (i & (m0 | m1)) continue;
    std::uint64_t idx[4] = {i, i | m1, i | m0, i | m0 | m1};
    Eigen::Vector4cd a;
    for (int b = 0; b < 4; ++b) a(b) = v(idx[b]);
    Eigen::Vector4cd b4 = g.u * a;
    for (int b = 0; b < 4; ++b) v(idx[b]) = b4(b);
  }
}

void mps_1q(Mps& m, int q, const Eigen::Matrix2cd& u) {
  auto& site = m.sites[q].m;
  Eigen::MatrixXcd a0 = site[0], a1 = site[1];
  site[0] = u(0, 0) * a0 + u(0, 1) * a1;
  site[1] = u(1, 0) * a0 + u(1, 1) * a1;
}

// Two-site update at the canonical center; returns the discarded weight.
double mps_2q(Mps& m, const Gate& g, int chi_sim) {
  int ql = std::min(g.q0, g.q1);
  if (std::abs(g.q0 - g.q1) != 1)
    throw std::invalid_argument("apply_circuit: two-qubit gate on non-adjacent qubits");
  shift_center(m, ql + 1);
  const Eigen::MatrixXcd* a = m.sites[ql].m.data();
  const Eigen::MatrixXcd* b = m.sites[ql + 1].m.data();
  const Eigen::VectorXd& lam = m.schmidt[ql];
  const Eigen::Index chil = a[0].rows(), chir = b[0].cols();

  Eigen::Matrix4cd gm = gate_matrix4(g);
  if (g.q0 == ql + 1) {  // gate basis has the right qubit as the high bit
    Eigen::Matrix4cd sw;
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int t1 = 0; t1 < 2; ++t1)
          for (int t2 = 0; t2 < 2; ++t2)
            sw(2 * s1 + s2, 2 * t1 + t2) = gm(2 * s2 + s1, 2 * t2 + t1);
    gm = sw;
  }

  std::array<Eigen::MatrixXcd, 4> theta;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta[2 * s1 + s2] = a[s1] * lam.asDiagonal() * b[s2];
  std::array<Eigen::MatrixXcd, 4> tp;
  for (int bp = 0; bp < 4; ++bp) {
    tp[bp] = Eigen::MatrixXcd::Zero(chil, chir);
    for (int bb = 0; bb < 4; ++bb)
      if (gm(bp, bb) != cplx(0.0)) tp[bp] += gm(bp, bb) * theta[bb];
  }

  Eigen::MatrixXcd mat(2 * chil, 2 * chir);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      for (Eigen::Index l = 0; l < chil; ++l)
        mat.block(2 * l + s1, s2 * chir, 1, chir) = tp[2 * s1 + s2].row(l);
  detail::SvdResult sv = detail::svd_fixed(mat);

  Eigen::Index keep = std::min<Eigen::Index>(chi_sim, sv.s.size());
  while (keep > 1 && sv.s(keep - 1) <= 0.0) --keep;
  double total = sv.s.squaredNorm();
  double kept = sv.s.head(keep).squaredNorm();
  double disc = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
  Eigen::VectorXd s = sv.s.head(keep);
  if (kept > 0.0) s *= std::sqrt(total / kept);  // keep the overall norm

  for (int p = 0; p < 2; ++p) {
    m.sites[ql].m[p].resize(chil, keep);
    for (Eigen::Index l = 0; l < chil; ++l)
      m.sites[ql].m[p].row(l) = sv.u.row(2 * l + p).head(keep);
    m.sites[ql + 1].m[p] = sv.v.block(p * chir, 0, chir, keep).adjoint();
  }
  m.schmidt[ql] = s;
  m.canonical_center = ql + 1;
  return disc;
}

}  // namespace

double QuantumState::norm() const { return use_dense ? vec.norm() : mps_norm(mps); }

cplx QuantumState::amplitude(std::uint64_t bits) const {
  return use_dense ? vec(static_cast<Eigen::Index>(bits)) : mps_amplitude(mps, bits);
}

QuantumState zero_state(int n_qubits, bool use_dense, int chi_sim) {
  if (n_qubits < 1 || n_qubits > 64)
    throw std::invalid_argument("zero_state: qubit count out of range");
  QuantumState st;
  st.n_qubits = n_qubits;
  st.use_dense = use_dense;
  st.chi_sim = chi_sim;
  if (use_dense) {
    if (n_qubits > 28) throw std::invalid_argument("zero_state: dense path limited to 28 qubits");
    st.vec = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_qubits);
    st.vec(0) = 1.0;
  } else {
    st.mps = mps_zero_state(n_qubits);
  }
  return st;
}

QuantumState state_from_mps(const Mps& m, bool use_dense, int chi_sim) {
  QuantumState st;
  st.n_qubits = m.n_qubits();
  st.use_dense = use_dense;
  st.chi_sim = chi_sim;
  if (use_dense) {
    if (st.n_qubits > 28)
      throw std::invalid_argument("state_from_mps: dense path limited to 28 qubits");
    st.vec = mps_to_vector(m);
  } else {
    st.mps = (m.canonical_center >= 1 && !m.schmidt.empty()) ? m : canonicalize(m, 1);
  }
  return st;
}

ApplyResult apply_circuit(const Circuit& c, const QuantumState& init) {
  if (c.n_qubits != init.n_qubits)
    throw std::invalid_argument("apply_circuit: qubit count mismatch");
  ApplyResult r;
  r.state = init;
  for (const Gate& g : c.gates) {
    if (r.state.use_dense) {
      switch (g.kind) {
        case GateKind::CNOT:
          dense_cnot(r.state.vec, c.n_qubits, g.q0, g.q1);
          break;
        case GateKind::U2Q:
          dense_u2q(r.state.vec, c.n_qubits, g);
          break;
        default:
          dense_1q(r.state.vec, c.n_qubits, g.q0, rotation_matrix(g.kind, g.angle));
      }
    } else {
      if (g.two_qubit())
        r.discarded_weight += mps_2q(r.state.mps, g, r.state.chi_sim);
      else
        mps_1q(r.state.mps, g.q0, rotation_matrix(g.kind, g.angle));
    }
  }
  r.chi_sim_warning = r.discarded_weight > 1e-6;
  return r;
}

double state_fidelity(const QuantumState& state, const Mps& m) {
  if (state.use_dense) {
    Eigen::VectorXcd t = mps_to_vector(m);
    return std::norm(state.vec.dot(t));
  }
  return fidelity(state.mps, m);
}

std::map<std::uint64_t, std::int64_t> sample(const QuantumState& state, std::int64_t shots,
                                             std::uint64_t seed) {
  std::map<std::uint64_t, std::int64_t> counts;
  if (shots < 0) throw std::invalid_argument("sample: negative shot count");
  if (state.use_dense) {
    const Eigen::VectorXcd& v = state.vec;
    const std::uint64_t size = static_cast<std::uint64_t>(v.size());
    int half = (state.n_qubits + 1) / 2;
    const std::uint64_t block = std::uint64_t(1) << half;
    const std::uint64_t nblocks = size / block;
    std::vector<double> cum(nblocks);
    double acc = 0.0;
    for (std::uint64_t bkt = 0; bkt < nblocks; ++bkt) {
      for (std::uint64_t i = bkt * block; i < (bkt + 1) * block; ++i) acc += std::norm(v(i));
      cum[bkt] = acc;
    }
    const double total = acc;
    for (std::int64_t shot = 0; shot < shots; ++shot) {
      double u = detail::uniform01(seed, 0, static_cast<std::uint64_t>(shot)) * total;
      std::uint64_t bkt =
          std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
      if (bkt >= nblocks) bkt = nblocks - 1;
      double lo = bkt > 0 ? cum[bkt - 1] : 0.0;
      std::uint64_t idx = bkt * block;
      for (std::uint64_t i = bkt * block; i < (bkt + 1) * block; ++i) {
        lo += std::norm(v(i));
        idx = i;
        if (lo >= u) break;
      }
      ++counts[idx];
    }
    return counts;
  }

  const Mps& m0 = state.mps;
  const int n = m0.n_qubits();
  Mps c = (n == 1 || (m0.canonical_center == 1 && !m0.schmidt.empty())) ? m0
                                                                        : canonicalize(m0, 1);
  // site 0 with the center weights absorbed; every later site is a right isometry
  std::array<Eigen::MatrixXcd, 2> head;
  for (int s = 0; s < 2; ++s)
    head[s] = n > 1 ? Eigen::MatrixXcd(c.sites[0].m[s] * c.schmidt[0].asDiagonal())
                    : c.sites[0].m[s];
  for (std::int64_t shot = 0; shot < shots; ++shot) {
    std::uint64_t j = 0;
    Eigen::RowVectorXcd env;
    for (int k = 0; k < n; ++k) {
      Eigen::RowVectorXcd w0, w1;
      if (k == 0) {
        w0 = head[0].row(0);
        w1 = head[1].row(0);
      } else {
        w0 = env * c.sites[k].m[0];
        w1 = env * c.sites[k].m[1];
      }
      double p0 = w0.squaredNorm(), p1 = w1.squaredNorm();
      double u = detail::uniform01(seed, static_cast<std::uint64_t>(shot),
                                   static_cast<std::uint64_t>(k)) *
                 (p0 + p1);
      int bit = u >= p0 ? 1 : 0;
      env = bit ? w1 : w0;
      double nn = env.norm();
      if (nn > 0.0) env /= nn;
      j = (j << 1) | static_cast<std::uint64_t>(bit);
    }
    ++counts[j];
  }
  return counts;
}

std::int64_t Histogram::total_shots() const {
  std::int64_t t = 0;
  for (const auto& [k, v] : counts) t += v;
  return t;
}

namespace {
std::string bitstring_of(std::uint64_t j, int n) {
  std::string s(n, '0');
  for (int b = 0; b < n; ++b)
    if (j & (std::uint64_t(1) << (n - 1 - b))) s[b] = '1';
  return s;
}
}  // namespace

void write_histogram_csv(const Histogram& h, std::ostream& os) {
  os << "bitstring,x,count\n";
  os.precision(17);
  for (const auto& [j, cnt] : h.counts)
    os << bitstring_of(j, h.grid.n_qubits) << ',' << h.grid.x_of_index(j) << ',' << cnt << '\n';
}

void write_histogram_json(const Histogram& h, std::ostream& os) {
  nlohmann::json out;
  out["n_qubits"] = h.grid.n_qubits;
  out["domain_length"] = h.grid.L;
  out["total_shots"] = h.total_shots();
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [j, cnt] : h.counts) counts[bitstring_of(j, h.grid.n_qubits)] = cnt;
  out["counts"] = std::move(counts);
  os << out.dump(2) << '\n';
}

}  // namespace mpsenc
