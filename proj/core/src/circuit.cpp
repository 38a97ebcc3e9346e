#include "mpsenc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "mpsenc/detail/linalg.hpp"

namespace mpsenc {

namespace {

constexpr double kPi = std::numbers::pi;

const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::CNOT: return "cx";
    case GateKind::U2Q: return "u2q";
  }
  throw std::logic_error("bad gate kind");
}

}  // namespace

double normalize_angle(double a) {
  double r = std::fmod(a, 4.0 * kPi);
  if (r > 2.0 * kPi) r -= 4.0 * kPi;
  if (r <= -2.0 * kPi) r += 4.0 * kPi;
  return r;
}

Eigen::Matrix2cd rotation_matrix(GateKind kind, double angle) {
  double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  Eigen::Matrix2cd m;
  switch (kind) {
    case GateKind::RX:
      m << cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0);
      return m;
    case GateKind::RY:
      m << cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0);
      return m;
    case GateKind::RZ:
      m << std::polar(1.0, -angle / 2.0), cplx(0, 0), cplx(0, 0), std::polar(1.0, angle / 2.0);
      return m;
    default:
      throw std::invalid_argument("rotation_matrix: not a rotation kind");
  }
}

Eigen::Matrix4cd gate_matrix4(const Gate& g) {
  if (!g.two_qubit()) throw std::invalid_argument("gate_matrix4: single-qubit gate");
  if (g.kind == GateKind::U2Q) return g.u;
  // CNOT, basis index 2*bit(q0) + bit(q1); q0 is the control here.
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

CircuitMetrics circuit_metrics(const Circuit& c) {
  CircuitMetrics out;
  std::vector<int> frontier(static_cast<std::size_t>(c.n_qubits), 0);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::U2Q) throw std::logic_error("circuit_metrics: unlowered two-qubit block");
    int level;
    if (g.kind == GateKind::CNOT) {
      level = std::max(frontier[static_cast<std::size_t>(g.q0)], frontier[static_cast<std::size_t>(g.q1)]) + 1;
      frontier[static_cast<std::size_t>(g.q0)] = level;
      frontier[static_cast<std::size_t>(g.q1)] = level;
      ++out.cnot_count;
    } else {
      level = frontier[static_cast<std::size_t>(g.q0)] + 1;
      frontier[static_cast<std::size_t>(g.q0)] = level;
    }
    out.depth = std::max(out.depth, level);
    ++out.gate_count;
  }
  return out;
}

namespace {

// Magic basis; columns are the Bell-like states that carry SU(2)xSU(2) to SO(4).
Eigen::Matrix4cd magic_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
  b(0, 0) = r;
  b(0, 1) = cplx(0, r);
  b(1, 2) = cplx(0, r);
  b(1, 3) = r;
  b(2, 2) = cplx(0, r);
  b(2, 3) = -r;
  b(3, 0) = r;
  b(3, 1) = cplx(0, -r);
  return b;
}

// Eigenphase sign patterns of exp(i(a XX + b YY + c ZZ)) in the magic basis.
constexpr double kDxx[4] = {1, -1, 1, -1};
constexpr double kDyy[4] = {-1, 1, 1, -1};
constexpr double kDzz[4] = {1, 1, -1, -1};

// Real orthogonal P diagonalizing the complex symmetric unitary m. Re(m) and
// Im(m) commute, so some rotation mixes them into a matrix with separated
// eigenvalues; a short deterministic list of angles always contains one.
Eigen::Matrix4d simdiag(const Eigen::Matrix4cd& m) {
  static const double trial[] = {0.0, 0.785398, 0.392699, 1.178097, 0.196350, 0.981748, 1.374447, 0.589049};
  for (double t : trial) {
    Eigen::Matrix4d h = std::cos(t) * m.real() + std::sin(t) * m.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    if (es.info() != Eigen::Success) continue;
    Eigen::Matrix4d p = es.eigenvectors();
    Eigen::Matrix4cd off = p.transpose() * m * p;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() < 1e-9) return p;
  }
  throw std::runtime_error("two-qubit lowering: simultaneous diagonalization failed");
}

struct MagicKak {
  Eigen::Matrix4d p;       // left real orthogonal factor, det +1
  Eigen::Vector4d theta;   // B^H W B = p * diag(exp(i theta)) * kr^T
  Eigen::Matrix4d kr;
};

// d_ref, when given, fixes the eigenvalue pairing instead of the canonical sort.
MagicKak magic_kak(const Eigen::Matrix4cd& wn, const Eigen::Vector4cd* d_ref) {
  static const Eigen::Matrix4cd b = magic_basis();
  Eigen::Matrix4cd mm = b.adjoint() * wn * b;
  Eigen::Matrix4cd sym = mm * mm.transpose();
  Eigen::Matrix4d p = simdiag(sym);
  Eigen::Vector4cd d = (p.transpose() * sym * p).diagonal();

  std::array<int, 4> order{0, 1, 2, 3};
  if (d_ref == nullptr) {
    std::array<std::int64_t, 4> key{};
    for (int i = 0; i < 4; ++i) key[static_cast<std::size_t>(i)] = std::llround(std::arg(d(i)) * 1e9);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
      return key[static_cast<std::size_t>(i)] < key[static_cast<std::size_t>(j)];
    });
  } else {
    std::array<bool, 4> used{};
    for (int j = 0; j < 4; ++j) {
      double best = 1e9;
      int bi = -1;
      for (int k = 0; k < 4; ++k) {
        double dist = std::abs(d(k) - (*d_ref)(j));
        if (!used[static_cast<std::size_t>(k)] && dist < best) {
          best = dist;
          bi = k;
        }
      }
      if (bi < 0 || best > 1e-6) throw std::runtime_error("two-qubit lowering: eigenvalue pairing failed");
      order[static_cast<std::size_t>(j)] = bi;
      used[static_cast<std::size_t>(bi)] = true;
    }
  }
  Eigen::Matrix4d ps;
  Eigen::Vector4cd ds;
  for (int j = 0; j < 4; ++j) {
    ps.col(j) = p.col(order[static_cast<std::size_t>(j)]);
    ds(j) = d(order[static_cast<std::size_t>(j)]);
  }
  if (ps.determinant() < 0) ps.col(3) *= -1.0;

  Eigen::Vector4d theta;
  for (int j = 0; j < 4; ++j) theta(j) = std::arg(ds(j)) / 2.0;
  cplx prod = 1.0;
  for (int j = 0; j < 4; ++j) prod *= std::polar(1.0, theta(j));
  if (prod.real() < 0) theta(0) -= kPi;  // det of the phase factor -> +1

  Eigen::Vector4cd inv_phase;
  for (int j = 0; j < 4; ++j) inv_phase(j) = std::polar(1.0, -theta(j));
  Eigen::Matrix4cd kr = mm.transpose() * ps * inv_phase.asDiagonal();
  if (kr.imag().cwiseAbs().maxCoeff() > 1e-7)
    throw std::runtime_error("two-qubit lowering: right factor not real");
  return {ps, theta, kr.real()};
}

struct ProtoGate {
  GateKind kind;
  int q;       // rotation target, or CNOT control with target = 1 - q
  double angle;
};

Eigen::Matrix4cd proto_product(const std::vector<ProtoGate>& ops) {
  static const Eigen::Matrix4cd cx01 = gate_matrix4(Gate::cnot(0, 1));
  Eigen::Matrix4cd cx10 = Eigen::Matrix4cd::Zero();
  cx10(0, 0) = 1;
  cx10(1, 3) = 1;
  cx10(2, 2) = 1;
  cx10(3, 1) = 1;
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  for (const ProtoGate& g : ops) {
    Eigen::Matrix4cd m;
    if (g.kind == GateKind::CNOT) {
      m = (g.q == 0) ? cx01 : cx10;
    } else {
      Eigen::Matrix2cd r = rotation_matrix(g.kind, g.angle);
      m = (g.q == 0) ? detail::kron2(r, Eigen::Matrix2cd::Identity())
                     : detail::kron2(Eigen::Matrix2cd::Identity(), r);
    }
    u = m * u;
  }
  return u;
}

Eigen::Matrix4cd template_matrix(double p1, double p2, double p3) {
  return proto_product({{GateKind::CNOT, 1, 0},
                        {GateKind::RY, 1, p3},
                        {GateKind::CNOT, 0, 0},
                        {GateKind::RZ, 0, p1},
                        {GateKind::RY, 1, p2},
                        {GateKind::CNOT, 1, 0}});
}

// Split a Kronecker-product unitary into its 2x2 factors (up to phase).
void kron_factor(const Eigen::Matrix4cd& l, Eigen::Matrix2cd& a1, Eigen::Matrix2cd& a2) {
  Eigen::Matrix4cd r;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int j1 = 0; j1 < 2; ++j1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j2 = 0; j2 < 2; ++j2) r(2 * i1 + j1, 2 * i2 + j2) = l(2 * i1 + i2, 2 * j1 + j2);
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) > 1e-7)
    throw std::runtime_error("two-qubit lowering: local factor is not a tensor product");
  double s0 = std::sqrt(svd.singularValues()(0));
  Eigen::Vector4cd u0 = svd.matrixU().col(0) * s0;
  Eigen::Vector4cd v0 = svd.matrixV().col(0).conjugate() * s0;
  a1 << u0(0), u0(1), u0(2), u0(3);
  a2 << v0(0), v0(1), v0(2), v0(3);
  cplx ph = std::sqrt(a1.determinant());
  a1 /= ph;
  a2 *= ph;
}

// U = locals * template * locals with exactly three CNOTs, verified before return.
std::vector<ProtoGate> lower_one(const Eigen::Matrix4cd& u) {
  static const Eigen::Matrix4cd b = magic_basis();
  Eigen::Matrix4cd un = u / std::pow(u.determinant(), 0.25);
  MagicKak ku = magic_kak(un, nullptr);

  double a = 0, bb = 0, c = 0;
  for (int j = 0; j < 4; ++j) {
    a += kDxx[j] * ku.theta(j);
    bb += kDyy[j] * ku.theta(j);
    c += kDzz[j] * ku.theta(j);
  }
  a /= 4.0;
  bb /= 4.0;
  c /= 4.0;
  const double p1 = 2.0 * a + kPi / 2.0, p2 = 2.0 * bb + kPi / 2.0, p3 = 2.0 * c + kPi / 2.0;

  Eigen::Matrix4cd t = template_matrix(p1, p2, p3);
  Eigen::Matrix4cd tn = t / std::pow(t.determinant(), 0.25);
  Eigen::Vector4cd d_ref;
  for (int j = 0; j < 4; ++j) d_ref(j) = std::polar(1.0, 2.0 * ku.theta(j));

  // eigenvalue multisets agree only up to a fourth root of unity
  Eigen::Matrix4cd mt = b.adjoint() * tn * b;
  Eigen::Matrix4cd symt = mt * mt.transpose();
  Eigen::Matrix4d pt0 = simdiag(symt);
  Eigen::Vector4cd dt0 = (pt0.transpose() * symt * pt0).diagonal();
  double best_cost = 1e18;
  cplx best_w = 1.0;
  for (cplx w : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) {
    double cost = 0;
    for (int k = 0; k < 4; ++k) {
      double dmin = 1e18;
      for (int j = 0; j < 4; ++j) dmin = std::min(dmin, std::abs(w * dt0(k) - d_ref(j)));
      cost += dmin;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_w = w;
    }
  }
  tn *= std::polar(1.0, std::arg(best_w) / 2.0);
  MagicKak kt = magic_kak(tn, &d_ref);

  Eigen::Vector4d sgn;
  for (int j = 0; j < 4; ++j) {
    cplx s = std::polar(1.0, ku.theta(j) - kt.theta(j));
    if (std::abs(s.imag()) > 1e-7 || std::abs(std::abs(s.real()) - 1.0) > 1e-7)
      throw std::runtime_error("two-qubit lowering: phase pattern mismatch");
    sgn(j) = s.real() >= 0 ? 1.0 : -1.0;
  }
  Eigen::Matrix4d ol = ku.p * sgn.asDiagonal() * kt.p.transpose();
  Eigen::Matrix4d orr = kt.kr * ku.kr.transpose();

  Eigen::Matrix2cd l1, l2, r1, r2;
  kron_factor(b * ol.cast<cplx>() * b.adjoint(), l1, l2);
  kron_factor(b * orr.cast<cplx>() * b.adjoint(), r1, r2);

  std::vector<ProtoGate> ops;
  auto emit_local = [&ops](const Eigen::Matrix2cd& v, int q) {
    auto [ga, be, al] = detail::zyz_angles(v);
    for (auto [kind, ang] : {std::pair{GateKind::RZ, ga}, {GateKind::RY, be}, {GateKind::RZ, al}}) {
      ang = normalize_angle(ang);
      if (std::abs(ang) > 1e-12) ops.push_back({kind, q, ang});
    }
  };
  emit_local(r1, 0);
  emit_local(r2, 1);
  ops.push_back({GateKind::CNOT, 1, 0});
  ops.push_back({GateKind::RY, 1, normalize_angle(p3)});
  ops.push_back({GateKind::CNOT, 0, 0});
  ops.push_back({GateKind::RZ, 0, normalize_angle(p1)});
  ops.push_back({GateKind::RY, 1, normalize_angle(p2)});
  ops.push_back({GateKind::CNOT, 1, 0});
  emit_local(l1, 0);
  emit_local(l2, 1);

  Eigen::Matrix4cd v = proto_product(ops);
  cplx ph = (v.adjoint() * u).trace() / 4.0;
  if (std::abs(ph) < 1e-6) throw std::runtime_error("two-qubit lowering: verification collapsed");
  ph /= std::abs(ph);
  if ((u - v * ph).cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("two-qubit lowering: verification failed");
  return ops;
}

}  // namespace

Circuit lower_u2q(const Circuit& c) {
  Circuit out;
  out.n_qubits = c.n_qubits;
  std::vector<std::size_t> remap(c.gates.size() + 1, 0);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    remap[i] = out.gates.size();
    const Gate& g = c.gates[i];
    if (g.kind != GateKind::U2Q) {
      out.gates.push_back(g);
      continue;
    }
    for (const ProtoGate& pg : lower_one(g.u)) {
      if (pg.kind == GateKind::CNOT) {
        int ctrl = pg.q == 0 ? g.q0 : g.q1;
        int tgt = pg.q == 0 ? g.q1 : g.q0;
        out.gates.push_back(Gate::cnot(ctrl, tgt));
      } else {
        Gate r{pg.kind, pg.q == 0 ? g.q0 : g.q1, -1, pg.angle};
        out.gates.push_back(r);
      }
    }
  }
  remap[c.gates.size()] = out.gates.size();
  out.layers = c.layers;
  for (LayerInfo& l : out.layers) {
    l.gate_begin = remap[l.gate_begin];
    l.gate_end = remap[l.gate_end];
  }
  return out;
}

void write_qasm(const Circuit& c, std::ostream& os) {
  os.precision(17);
  os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  os << "// qubit 0 carries the most significant bit of the grid index\n";
  os << "qreg q[" << c.n_qubits << "];\n";
  std::size_t layer_idx = 0;
  for (std::size_t i = 0; i <= c.gates.size(); ++i) {
    while (layer_idx < c.layers.size() && c.layers[layer_idx].gate_begin == i) {
      const LayerInfo& l = c.layers[layer_idx];
      os << "// layer " << layer_idx << ": origin bond " << l.origin;
      if (!l.skipped_bonds.empty()) {
        os << ", skipped bonds";
        for (int bnd : l.skipped_bonds) os << ' ' << bnd;
      }
      os << '\n';
      ++layer_idx;
    }
    if (i == c.gates.size()) break;
    const Gate& g = c.gates[i];
    switch (g.kind) {
      case GateKind::CNOT:
        os << "cx q[" << g.q0 << "],q[" << g.q1 << "];\n";
        break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        os << kind_name(g.kind) << '(' << g.angle << ") q[" << g.q0 << "];\n";
        break;
      case GateKind::U2Q:
        throw std::invalid_argument("write_qasm: lower two-qubit blocks first");
    }
  }
}

void write_circuit_json(const Circuit& c, std::ostream& os) {
  nlohmann::json j;
  j["n_qubits"] = c.n_qubits;
  auto& gates = j["gates"] = nlohmann::json::array();
  for (const Gate& g : c.gates) {
    nlohmann::json jg{{"kind", kind_name(g.kind)}, {"q0", g.q0}};
    if (g.kind == GateKind::CNOT || g.kind == GateKind::U2Q) jg["q1"] = g.q1;
    if (g.kind == GateKind::RX || g.kind == GateKind::RY || g.kind == GateKind::RZ) jg["angle"] = g.angle;
    if (g.kind == GateKind::U2Q) {
      auto& m = jg["u"] = nlohmann::json::array();
      for (int r = 0; r < 4; ++r) {
        auto row = nlohmann::json::array();
        for (int col = 0; col < 4; ++col) row.push_back({g.u(r, col).real(), g.u(r, col).imag()});
        m.push_back(row);
      }
    }
    gates.push_back(std::move(jg));
  }
  auto& layers = j["layers"] = nlohmann::json::array();
  for (const LayerInfo& l : c.layers) {
    layers.push_back({{"origin", l.origin},
                      {"gate_begin", l.gate_begin},
                      {"gate_end", l.gate_end},
                      {"skipped_bonds", l.skipped_bonds}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace mpsenc
