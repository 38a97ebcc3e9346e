#include "mpsenc/funcspace.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mpsenc/detail/specfun.hpp"

namespace mpsenc {

DistKind DistributionSpec::kind_from_string(const std::string& s) {
  if (s == "normal") return DistKind::normal;
  if (s == "log_normal" || s == "lognormal") return DistKind::log_normal;
  if (s == "levy") return DistKind::levy;
  if (s == "gamma") return DistKind::gamma;
  if (s == "sin_test") return DistKind::sin_test;
  if (s == "exp_test") return DistKind::exp_test;
  if (s == "constant") return DistKind::constant;
  throw std::invalid_argument("unknown distribution kind: " + s);
}

std::string DistributionSpec::kind_to_string(DistKind k) {
  switch (k) {
    case DistKind::normal: return "normal";
    case DistKind::log_normal: return "log_normal";
    case DistKind::levy: return "levy";
    case DistKind::gamma: return "gamma";
    case DistKind::sin_test: return "sin_test";
    case DistKind::exp_test: return "exp_test";
    case DistKind::constant: return "constant";
  }
  throw std::logic_error("bad kind");
}

double distribution_pdf(const DistributionSpec& d, double x) {
  switch (d.kind) {
    case DistKind::normal: {
      double z = (x - d.mu) / d.scale;
      return std::exp(-0.5 * z * z) / (d.scale * std::sqrt(2.0 * M_PI));
    }
    case DistKind::log_normal: {
      if (x <= 0.0) return 0.0;
      double z = (std::log(x) - d.mu) / d.scale;
      return std::exp(-0.5 * z * z) / (x * d.scale * std::sqrt(2.0 * M_PI));
    }
    case DistKind::levy: {
      if (x <= 0.0) return 0.0;
      return std::sqrt(d.scale / (2.0 * M_PI)) * std::exp(-0.5 * d.scale / x) / (x * std::sqrt(x));
    }
    case DistKind::gamma: {
      if (x < 0.0) return 0.0;
      if (x == 0.0) {
        if (d.shape > 1.0) return 0.0;
        if (d.shape == 1.0) return 1.0 / d.scale;
        return std::numeric_limits<double>::infinity();
      }
      return std::exp((d.shape - 1.0) * std::log(x) - x / d.scale -
                      std::lgamma(d.shape) - d.shape * std::log(d.scale));
    }
    case DistKind::sin_test: {
      double s = std::sin(M_PI * x / d.L);
      return 2.0 / d.L * s * s;
    }
    case DistKind::exp_test: {
      double b = d.scale;
      return 2.0 * b * std::exp(2.0 * b * x) / std::expm1(2.0 * b * d.L);
    }
    case DistKind::constant:
      return 1.0 / d.L;
  }
  throw std::logic_error("bad kind");
}

double distribution_cdf(const DistributionSpec& d, double x) {
  if (x < 0.0 || x > d.L) throw std::domain_error("distribution_cdf: x outside [0, L]");
  switch (d.kind) {
    case DistKind::normal:
      return detail::norm_cdf((x - d.mu) / d.scale);
    case DistKind::log_normal:
      if (x <= 0.0) return 0.0;
      return detail::norm_cdf((std::log(x) - d.mu) / d.scale);
    case DistKind::levy:
      if (x <= 0.0) return 0.0;
      return std::erfc(std::sqrt(0.5 * d.scale / x));
    case DistKind::gamma:
      if (x <= 0.0) return 0.0;
      return detail::gamma_p(d.shape, x / d.scale);
    case DistKind::sin_test:
      return x / d.L - std::sin(2.0 * M_PI * x / d.L) / (2.0 * M_PI);
    case DistKind::exp_test:
      return std::expm1(2.0 * d.scale * x) / std::expm1(2.0 * d.scale * d.L);
    case DistKind::constant:
      return x / d.L;
  }
  throw std::logic_error("bad kind");
}

FunctionOracle sqrt_pdf_oracle(const DistributionSpec& d) {
  double r2 = distribution_cdf(d, d.L) - distribution_cdf(d, 0.0);
  if (!(r2 > 1e-300)) throw std::runtime_error("sqrt_pdf_oracle: truncated mass vanishes on [0, L]");
  double inv_r = 1.0 / std::sqrt(r2);

  FunctionOracle o;
  o.is_real = true;
  DistributionSpec dist = d;
  o.eval = [dist, inv_r](double x) -> cplx {
    return inv_r * std::sqrt(distribution_pdf(dist, x));
  };

  // f = exp(g) piecewise; f' = g' f, f'' = (g'' + g'^2) f. Oracles below
  // return exact limits at x = 0 where the density vanishes faster than any power.
  switch (d.kind) {
    case DistKind::normal: {
      double mu = d.mu, s2 = d.scale * d.scale;
      auto gp = [mu, s2](double x) { return -(x - mu) / (2.0 * s2); };
      double gpp = -1.0 / (2.0 * s2);
      o.deriv1 = [o, gp](double x) -> cplx { return gp(x) * o.eval(x); };
      o.deriv2 = [o, gp, gpp](double x) -> cplx {
        double g1 = gp(x);
        return (gpp + g1 * g1) * o.eval(x);
      };
      break;
    }
    case DistKind::log_normal: {
      double mu = d.mu, s2 = d.scale * d.scale;
      o.deriv1 = [o, mu, s2](double x) -> cplx {
        if (x <= 0.0) return 0.0;
        double g1 = -(std::log(x) - mu) / (2.0 * s2 * x) - 0.5 / x;
        return g1 * o.eval(x);
      };
      o.deriv2 = [o, mu, s2](double x) -> cplx {
        if (x <= 0.0) return 0.0;
        double lx = std::log(x) - mu;
        double g1 = -lx / (2.0 * s2 * x) - 0.5 / x;
        double g2 = lx / (2.0 * s2 * x * x) - 1.0 / (2.0 * s2 * x * x) + 0.5 / (x * x);
        return (g2 + g1 * g1) * o.eval(x);
      };
      break;
    }
    case DistKind::levy: {
      double c = d.scale;
      o.deriv1 = [o, c](double x) -> cplx {
        if (x <= 0.0) return 0.0;
        double g1 = 0.25 * c / (x * x) - 0.75 / x;
        return g1 * o.eval(x);
      };
      o.deriv2 = [o, c](double x) -> cplx {
        if (x <= 0.0) return 0.0;
        double g1 = 0.25 * c / (x * x) - 0.75 / x;
        double g2 = -0.5 * c / (x * x * x) + 0.75 / (x * x);
        return (g2 + g1 * g1) * o.eval(x);
      };
      break;
    }
    case DistKind::gamma: {
      double a = 0.5 * (d.shape - 1.0), th = d.scale;
      o.deriv1 = [o, a, th](double x) -> cplx {
        if (x <= 0.0) {
          if (a == 0.0) return -o.eval(0.0) / (2.0 * th);
          return a > 0.5 ? cplx(0.0) : cplx(std::numeric_limits<double>::quiet_NaN());
        }
        return (a / x - 0.5 / th) * o.eval(x);
      };
      o.deriv2 = [o, a, th](double x) -> cplx {
        if (x <= 0.0) {
          if (a == 0.0) return o.eval(0.0) / (4.0 * th * th);
          return a > 1.0 ? cplx(0.0) : cplx(std::numeric_limits<double>::quiet_NaN());
        }
        double g1 = a / x - 0.5 / th;
        return (-a / (x * x) + g1 * g1) * o.eval(x);
      };
      break;
    }
    case DistKind::sin_test: {
      double w = M_PI / d.L;
      double amp = inv_r * std::sqrt(2.0 / d.L);
      o.deriv1 = [amp, w](double x) -> cplx { return amp * w * std::cos(w * x); };
      o.deriv2 = [o, w](double x) -> cplx { return -w * w * o.eval(x); };
      break;
    }
    case DistKind::exp_test: {
      double b = d.scale;
      o.deriv1 = [o, b](double x) -> cplx { return b * o.eval(x); };
      o.deriv2 = [o, b](double x) -> cplx { return b * b * o.eval(x); };
      break;
    }
    case DistKind::constant: {
      o.deriv1 = [](double) -> cplx { return 0.0; };
      o.deriv2 = [](double) -> cplx { return 0.0; };
      break;
    }
  }
  return o;
}

Eigen::VectorXcd discretize(const FunctionOracle& oracle, const Grid& grid) {
  if (grid.n_qubits > 28) throw std::invalid_argument("discretize: dense path limited to 28 qubits");
  const std::uint64_t n = 1ull << grid.n_qubits;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::uint64_t j = 0; j < n; ++j) {
    double x = grid.x_of_index(j);
    cplx val = oracle.eval(x);
    if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
      std::ostringstream msg;
      msg << "discretize: non-finite oracle value at x = " << x;
      throw std::runtime_error(msg.str());
    }
    v(static_cast<Eigen::Index>(j)) = val;
  }
  double nrm = v.norm();
  if (!(nrm > 0.0)) throw std::runtime_error("discretize: oracle vanishes on the whole grid");
  return v / nrm;
}

cplx stencil_deriv1(const std::function<cplx(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

cplx stencil_deriv2(const std::function<cplx(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) /
         (12.0 * h * h);
}

}  // namespace mpsenc
