#include "mpsenc/analytic.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "mpsenc/detail/quad.hpp"
#include "mpsenc/detail/specfun.hpp"

namespace mpsenc {

namespace {

constexpr double kQuadTol = 1e-10;

std::function<cplx(double)> derivative_fn(const FunctionOracle& o, double L, int n) {
  if (n == 0) return o.eval;
  if (n == 1) {
    if (o.deriv1) return o.deriv1;
    double h = L * std::cbrt(std::numeric_limits<double>::epsilon());
    auto f = o.eval;
    return [f, h](double x) { return stencil_deriv1(f, x, h); };
  }
  if (o.deriv2) return o.deriv2;
  double h = L * std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  auto f = o.eval;
  return [f, h](double x) { return stencil_deriv2(f, x, h); };
}

}  // namespace

cplx inner_h(const FunctionOracle& oracle, double L, int n, int m) {
  if (n < 0 || n > 2 || m < 0 || m > 2) throw std::invalid_argument("inner_h: orders up to 2");
  auto fn = derivative_fn(oracle, L, n);
  auto fm = derivative_fn(oracle, L, m);
  double scale = std::pow(L, n + m + 1);
  auto real_part = [&](double u) {
    cplx a = fn(L * u), b = fm(L * u);
    return scale * (a * std::conj(b)).real();
  };
  double re = detail::integrate(real_part, 0.0, 1.0, kQuadTol);
  double im = 0.0;
  if (!oracle.is_real) {
    auto imag_part = [&](double u) {
      cplx a = fn(L * u), b = fm(L * u);
      return scale * (a * std::conj(b)).imag();
    };
    im = detail::integrate(imag_part, 0.0, 1.0, kQuadTol);
  }
  return {re, im};
}

InnerProducts compute_inner_products(const FunctionOracle& oracle, double L) {
  InnerProducts ip;
  for (int n = 0; n <= 2; ++n)
    for (int m = 0; m <= n; ++m) {
      ip.h[n][m] = inner_h(oracle, L, n, m);
      ip.h[m][n] = std::conj(ip.h[n][m]);
    }
  return ip;
}

double g1(const FunctionOracle& oracle, double L) {
  cplx h11 = inner_h(oracle, L, 1, 1);
  cplx h10 = inner_h(oracle, L, 1, 0);
  double h00 = inner_h(oracle, L, 0, 0).real();
  if (!(h00 > 0.0)) throw std::runtime_error("g1: oracle has vanishing norm");
  // normalize by h00 so slightly unnormalized oracles are handled consistently
  double val = h11.real() / h00 - std::norm(h10) / (h00 * h00);
  if (val < -1e-9) throw std::runtime_error("g1: negative beyond tolerance, quadrature inconsistent");
  return std::max(val, 0.0);
}

double g2(const FunctionOracle& oracle, double L) {
  InnerProducts ip = compute_inner_products(oracle, L);
  double h00 = ip.h[0][0].real();
  if (!(h00 > 0.0)) throw std::runtime_error("g2: oracle has vanishing norm");
  // Gram matrix of {f, f'} and cross vector <b_i | f''>, normalized by h00
  Eigen::Matrix2cd gram;
  gram << ip.h[0][0] / h00, ip.h[1][0] / h00, ip.h[0][1] / h00, ip.h[1][1] / h00;
  Eigen::Vector2cd w(ip.h[2][0] / h00, ip.h[2][1] / h00);
  double h22 = ip.h[2][2].real() / h00;

  // rank-revealing pseudo-inverse handles f' parallel to f
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gram);
  double wmax = es.eigenvalues().maxCoeff();
  cplx proj = 0.0;
  for (int i = 0; i < 2; ++i) {
    double ev = es.eigenvalues()(i);
    if (ev > 1e-12 * wmax) {
      cplx coef = es.eigenvectors().col(i).adjoint() * w;
      proj += std::norm(coef) / ev;
    }
  }
  double val = h22 - proj.real();
  if (val < -1e-6 * std::abs(h22)) throw std::runtime_error("g2: negative beyond tolerance");
  return std::max(val, 0.0);
}

SpectrumPrediction predicted_spectrum(double g1_value, double g2_value, int k) {
  double fourk = std::pow(4.0, k);
  SpectrumPrediction s;
  s.lam1 = std::sqrt(g1_value / 12.0) / std::pow(2.0, k);
  s.lam0 = 1.0 - g1_value / (24.0 * fourk);
  s.lam2 = std::sqrt(g2_value / (720.0 * fourk * fourk));
  s.p = 1.0 - g1_value / (6.0 * fourk);
  s.in_window = g1_value / fourk < 1.0;
  return s;
}

double eigenvalue_scaling(double gm, int m, int k) {
  if (m < 1) throw std::invalid_argument("eigenvalue_scaling: m >= 1");
  auto det_h = [](int s) {
    Eigen::MatrixXd h(s, s);
    for (int n = 0; n < s; ++n)
      for (int l = 0; l < s; ++l) h(n, l) = 1.0 / (n + l + 1);
    return h.determinant();
  };
  double fact = std::tgamma(m + 1.0);
  return gm / (fact * fact * std::pow(4.0, static_cast<double>(m) * k)) * det_h(m + 1) / det_h(m);
}

namespace {

double gup(double s, double x) { return detail::gamma_upper(s, x); }

double g1_normal_closed(double sig, double L) {
  double z = L * L / (8.0 * sig * sig);
  double low = std::tgamma(0.5) - gup(0.5, z);  // lower incomplete gamma(1/2, z)
  return L * L / (4.0 * sig * sig) *
         (1.0 - std::sqrt(L * L / (2.0 * sig * sig)) * std::exp(-z) / low);
}

double g2_normal_closed_impl(double sig, double L) {
  double z = L * L / (8.0 * sig * sig);
  double den = std::tgamma(0.5) - gup(0.5, z);
  double s2 = sig * sig, s4 = s2 * s2, s6 = s4 * s2;
  double l2 = L * L, l4 = l2 * l2, l6 = l4 * l2;
  return l4 / (8.0 * s4) -
         l4 / (4.0 * s4) *
             (std::sqrt(l2 / (32.0 * s2)) + std::pow(std::sqrt(l2 / (8.0 * s2)), 3)) *
             std::exp(-z) / den -
         l6 / (32.0 * s6) * std::exp(-l2 / (4.0 * s2)) / (den * den);
}

double g1_lognormal_closed(double mu, double sig, double L) {
  double a = (std::log(L) - mu) / sig;
  double s2 = sig * sig;
  double pref = L * L * std::exp(-2.0 * mu + 2.0 * s2) /
                (4.0 * s2 * (std::sqrt(2.0 * M_PI) - gup(0.5, a * a / 2.0) / std::sqrt(2.0)));
  double b = a + 2.0 * sig;
  double t1 = (1.0 + s2) / std::sqrt(2.0) * (2.0 * std::sqrt(M_PI) - gup(0.5, b * b / 2.0));
  // boundary term of the Gaussian moments after completing the square: 2 sigma - b = -a
  double t2 = -a * std::exp(-b * b / 2.0);
  double d = 2.0 * std::sqrt(M_PI) - gup(0.5, a * a / 2.0);
  double t3 = L * L * std::exp(-2.0 * mu + s2 - (a + sig) * (a + sig)) / (2.0 * s2 * d * d);
  return pref * (t1 + t2) - t3;
}

double g1_levy_closed(double c, double L) {
  double z = c / (2.0 * L);
  double gz = gup(0.5, z);
  return 21.0 * L * L / (8.0 * c * c) +
         4.0 * L * L * std::exp(-z) / (c * c * gz) *
             (21.0 / 16.0 * std::sqrt(z) + 7.0 / 8.0 * std::pow(z, 1.5) +
              1.0 / 8.0 * std::pow(z, 2.5) + 1.0 / 4.0 * std::pow(z, 3.5)) -
         L * L / (c * c * gz * gz) * z * z * z * std::exp(-c / L);
}

}  // namespace

double closed_form_g1(const DistributionSpec& dist) {
  switch (dist.kind) {
    case DistKind::normal:
      return g1_normal_closed(dist.scale, dist.L);
    case DistKind::log_normal:
      return g1_lognormal_closed(dist.mu, dist.scale, dist.L);
    case DistKind::levy:
      return g1_levy_closed(dist.scale, dist.L);
    default:
      throw std::invalid_argument("closed_form_g1: only normal, log_normal, levy");
  }
}

double closed_form_g2_normal(double sigma, double L) { return g2_normal_closed_impl(sigma, L); }

double one_layer_infidelity_estimate(double g2_value, int m_first,
                                     std::optional<int> window_start) {
  if (m_first < 2) throw std::invalid_argument("one_layer_infidelity_estimate: m_first >= 2");
  int k0 = m_first;
  if (window_start && *window_start > k0) k0 = *window_start;
  return g2_value / (720.0 * 15.0 * std::pow(16.0, k0 - 1));
}

int validity_window_start(const DistributionSpec& dist) {
  double scale_eff;
  switch (dist.kind) {
    case DistKind::normal:
    case DistKind::log_normal:
    case DistKind::levy:
      scale_eff = dist.scale;
      break;
    default:
      return 1;
  }
  int k0 = static_cast<int>(std::ceil(std::log2(dist.L / (2.0 * scale_eff))));
  return std::max(k0, 1);
}

EntropyBoundResult entropy_bound_check(const EntanglementProfile& profile, double g1_value) {
  int nb = static_cast<int>(profile.spectra.size());
  EntropyBoundResult res{true, 0.0, 0};
  double c = 0.0;
  for (int k = 1; k <= nb; ++k) {
    if (g1_value / std::pow(4.0, k) >= 1.0) continue;  // outside validity window
    double bound_shape = k / std::pow(4.0, k);
    double s = profile.entropies(k - 1);
    if (res.first_bond == 0) {
      res.first_bond = k;
      c = s / bound_shape;
      res.margin = 1.0;
      continue;
    }
    double lim = c * bound_shape;
    double ratio = lim > 0.0 ? s / lim : (s <= 1e-15 ? 0.0 : std::numeric_limits<double>::infinity());
    res.margin = std::max(res.margin, ratio);
    if (s > lim * (1.0 + 1e-9) + 1e-15) res.pass = false;
  }
  return res;
}

}  // namespace mpsenc
