#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mpsenc/detail/rng.hpp"
#include "mpsenc/tci.hpp"

namespace mpsenc {
namespace {

std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1;
}

struct Evaluator {
  const FunctionOracle& oracle;
  const Grid& grid;
  std::unordered_map<std::uint64_t, cplx> cache;
  std::uint64_t calls = 0;

  cplx operator()(std::uint64_t j) {
    auto it = cache.find(j);
    if (it != cache.end()) return it->second;
    cplx v = oracle.eval(grid.x_of_index(j));
    ++calls;
    cache.emplace(j, v);
    return v;
  }
};

struct PivotSel {
  std::vector<int> rows, cols;
};

// Greedy full-pivot elimination; stops at rmax pivots or when the next pivot
// falls below 1e-13 of the first.
PivotSel greedy_lu(Eigen::MatrixXcd e, Eigen::Index rmax) {
  PivotSel sel;
  double first = 0.0;
  for (Eigen::Index it = 0; it < rmax; ++it) {
    Eigen::Index p = 0, q = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < e.rows(); ++i)
      for (Eigen::Index j = 0; j < e.cols(); ++j) {
        double m = std::abs(e(i, j));
        if (m > best) {
          best = m;
          p = i;
          q = j;
        }
      }
    if (it == 0) first = best;
    if (best <= 0.0 || best <= 1e-13 * first) break;
    sel.rows.push_back(static_cast<int>(p));
    sel.cols.push_back(static_cast<int>(q));
    e -= e.col(q) * e.row(p) / e(p, q);
  }
  return sel;
}

// A * P^{-1} via a transposed solve.
Eigen::MatrixXcd right_solve(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& p) {
  return p.transpose().fullPivLu().solve(a.transpose()).transpose();
}

struct Cross {
  int n;
  std::vector<std::vector<std::uint64_t>> iset;  // iset[k]: k-bit prefixes, bond k; iset[0] = {0}
  std::vector<std::vector<std::uint64_t>> jset;  // jset[k]: (n-k)-bit suffixes; jset[n] = {0}

  explicit Cross(int n_qubits, std::uint64_t seed_index) : n(n_qubits) {
    iset.resize(n + 1);
    jset.resize(n + 1);
    iset[0] = {0};
    jset[n] = {0};
    for (int k = 1; k <= n - 1; ++k) {
      iset[k] = {seed_index >> (n - k)};
      jset[k] = {seed_index & low_mask(n - k)};
    }
  }

  void update_bond(Evaluator& ev, int k, Eigen::Index rt) {
    const auto& il = iset[k - 1];
    const auto& jr = jset[k + 1];
    const Eigen::Index a = static_cast<Eigen::Index>(il.size());
    const Eigen::Index b = static_cast<Eigen::Index>(jr.size());
    const int tail = n - k - 1;
    Eigen::MatrixXcd pi(2 * a, 2 * b);
    for (Eigen::Index i = 0; i < a; ++i)
      for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
          for (Eigen::Index j = 0; j < b; ++j) {
            std::uint64_t idx =
                ((((il[i] << 1) | std::uint64_t(s0)) << 1 | std::uint64_t(s1)) << tail) | jr[j];
            pi(2 * i + s0, s1 * b + j) = ev(idx);
          }
    PivotSel sel = greedy_lu(pi, std::min({rt, 2 * a, 2 * b}));
    if (sel.rows.empty()) throw std::runtime_error("cross update found no usable pivot");
    std::vector<std::uint64_t> ni, nj;
    for (int r : sel.rows) ni.push_back((il[r / 2] << 1) | std::uint64_t(r % 2));
    for (int c : sel.cols)
      nj.push_back((std::uint64_t(c / b) << tail) | jr[c % b]);
    iset[k] = std::move(ni);
    jset[k] = std::move(nj);
  }

  Mps build(Evaluator& ev) const {
    Mps m;
    m.sites.resize(n);
    const Eigen::Index r1 = static_cast<Eigen::Index>(iset[1].size());
    {
      Eigen::MatrixXcd a1(2, r1), p1(r1, r1);
      for (int s = 0; s < 2; ++s)
        for (Eigen::Index j = 0; j < r1; ++j)
          a1(s, j) = ev((std::uint64_t(s) << (n - 1)) | jset[1][j]);
      for (Eigen::Index i = 0; i < r1; ++i)
        for (Eigen::Index j = 0; j < r1; ++j)
          p1(i, j) = ev((iset[1][i] << (n - 1)) | jset[1][j]);
      Eigen::MatrixXcd g = right_solve(a1, p1);
      for (int s = 0; s < 2; ++s) m.sites[0].m[s] = g.row(s);
    }
    for (int s = 1; s <= n - 2; ++s) {
      const auto& il = iset[s];
      const auto& ic = iset[s + 1];
      const auto& jr = jset[s + 1];
      const Eigen::Index rl = static_cast<Eigen::Index>(il.size());
      const Eigen::Index rr = static_cast<Eigen::Index>(jr.size());
      const int tail = n - s - 1;
      Eigen::MatrixXcd a(2 * rl, rr), p(rr, rr);
      for (Eigen::Index l = 0; l < rl; ++l)
        for (int sg = 0; sg < 2; ++sg)
          for (Eigen::Index j = 0; j < rr; ++j)
            a(2 * l + sg, j) = ev((((il[l] << 1) | std::uint64_t(sg)) << tail) | jr[j]);
      for (Eigen::Index i = 0; i < rr; ++i)
        for (Eigen::Index j = 0; j < rr; ++j) p(i, j) = ev((ic[i] << tail) | jr[j]);
      Eigen::MatrixXcd g = right_solve(a, p);
      for (int sg = 0; sg < 2; ++sg) {
        m.sites[s].m[sg].resize(rl, rr);
        for (Eigen::Index l = 0; l < rl; ++l) m.sites[s].m[sg].row(l) = g.row(2 * l + sg);
      }
    }
    {
      const auto& il = iset[n - 1];
      const Eigen::Index rl = static_cast<Eigen::Index>(il.size());
      for (int s = 0; s < 2; ++s) {
        m.sites[n - 1].m[s].resize(rl, 1);
        for (Eigen::Index l = 0; l < rl; ++l)
          m.sites[n - 1].m[s](l, 0) = ev((il[l] << 1) | std::uint64_t(s));
      }
    }
    return m;
  }
};

std::uint64_t random_index(std::uint64_t seed, std::uint64_t i, int n) {
  return detail::mix3(seed, 17, i) & low_mask(n);
}

TciErrorEstimate estimate_against(const Mps& m, const std::function<cplx(std::uint64_t)>& f,
                                  int n_qubits, int n, std::uint64_t seed) {
  std::vector<cplx> amp(n), val(n);
  cplx num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    std::uint64_t j = random_index(seed, static_cast<std::uint64_t>(i), n_qubits);
    amp[i] = mps_amplitude(m, j);
    val[i] = f(j);
    num += std::conj(val[i]) * amp[i];
    den += std::norm(val[i]);
  }
  TciErrorEstimate est;
  if (den == 0.0) {
    est.mean_rel = est.max_rel = std::numeric_limits<double>::infinity();
    return est;
  }
  cplx alpha = num / den;
  double peak = 0.0;
  for (int i = 0; i < n; ++i) peak = std::max(peak, std::abs(alpha * val[i]));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    // denominator floored near the largest sample so dead-tail zeros of the
    // oracle do not divide out to infinity
    double d = std::max(std::abs(alpha * val[i]), 1e-16 * peak);
    double rel = std::abs(amp[i] - alpha * val[i]) / d;
    sum += rel;
    est.max_rel = std::max(est.max_rel, rel);
  }
  est.mean_rel = sum / n;
  return est;
}

}  // namespace

TciResult tci_build(const FunctionOracle& oracle, const Grid& grid, const TciConfig& cfg) {
  if (cfg.max_rank < 2) throw std::invalid_argument("tci_build: max_rank must be >= 2");
  if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("tci_build: rel_tol must be positive");
  if (cfg.max_sweeps < 1 || cfg.n_error_samples < 1)
    throw std::invalid_argument("tci_build: sweep and sample counts must be positive");
  const int n = grid.n_qubits;
  Evaluator ev{oracle, grid, {}, 0};
  TciResult out;

  if (n == 1) {
    Mps m;
    m.sites.resize(1);
    for (int s = 0; s < 2; ++s) m.sites[0].m[s] = Eigen::MatrixXcd::Constant(1, 1, ev(s));
    double nn = mps_norm(m);
    if (!(nn > 0.0)) throw std::runtime_error("tci_build: oracle vanishes on the grid");
    for (int s = 0; s < 2; ++s) m.sites[0].m[s] /= nn;
    out.mps = std::move(m);
    out.converged = true;
    out.sweeps = 0;
    out.oracle_calls = ev.calls;
    return out;
  }

  // coarse scan for a high-magnitude pivot path; random pivots would land in
  // negligible-tail regions for localized functions
  const std::uint64_t nscan = std::min<std::uint64_t>(std::uint64_t(1) << std::min(n, 12), 4096);
  const std::uint64_t stride = n <= 12 ? 1 : (std::uint64_t(1) << (n - 12));
  std::uint64_t seed_index = 0;
  double best = -1.0;
  for (std::uint64_t t = 0; t < nscan; ++t) {
    std::uint64_t j = t * stride;
    double mag = std::abs(ev(j));
    if (mag > best) {
      best = mag;
      seed_index = j;
    }
  }
  if (!(best > 0.0)) throw std::runtime_error("tci_build: oracle vanishes on the scanned grid");

  Cross cross(n, seed_index);
  Mps raw;
  Eigen::Index rt = 2;
  auto cached_value = [&ev](std::uint64_t j) { return ev(j); };
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    if (sweep % 2 == 1)
      for (int k = 1; k <= n - 1; ++k) cross.update_bond(ev, k, rt);
    else
      for (int k = n - 1; k >= 1; --k) cross.update_bond(ev, k, rt);
    raw = cross.build(ev);
    out.error = estimate_against(raw, cached_value, n, cfg.n_error_samples, cfg.rng_seed);
    out.sweeps = sweep;
    if (out.error.mean_rel <= cfg.rel_tol) {
      out.converged = true;
      break;
    }
    rt = std::min<Eigen::Index>(rt * 2, cfg.max_rank);
  }

  double nn = mps_norm(raw);
  if (!(nn > 0.0)) throw std::runtime_error("tci_build: interpolant has zero norm");
  for (int s = 0; s < 2; ++s) raw.sites[0].m[s] /= nn;
  out.mps = canonicalize(raw, 1);
  out.oracle_calls = ev.calls;
  return out;
}

TciErrorEstimate tci_error_estimate(const Mps& m, const FunctionOracle& oracle, const Grid& grid,
                                    int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("tci_error_estimate: sample count must be positive");
  auto f = [&](std::uint64_t j) { return oracle.eval(grid.x_of_index(j)); };
  return estimate_against(m, f, grid.n_qubits, n, seed);
}

}  // namespace mpsenc
