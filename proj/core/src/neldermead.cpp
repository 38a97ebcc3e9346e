#include "mpsenc/detail/neldermead.hpp"

#include <algorithm>
#include <cmath>

namespace mpsenc::detail {

NmResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& x0,
                     const std::vector<int>& active,
                     int max_evals,
                     double initial_step) {
  const int n = static_cast<int>(active.size());
  NmResult best;
  best.x = x0;
  best.evals = 0;

  auto expand = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd full = x0;
    for (int i = 0; i < n; ++i) full(active[i]) = y(i);
    return full;
  };
  auto eval = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd full = expand(y);
    double v = f(full);
    ++best.evals;
    if (best.evals == 1 || v < best.value) {
      best.value = v;
      best.x = full;
    }
    return v;
  };

  Eigen::VectorXd y0(n);
  for (int i = 0; i < n; ++i) y0(i) = x0(active[i]);
  if (n == 0) {
    eval(y0);
    return best;
  }

  std::vector<Eigen::VectorXd> pts(n + 1, y0);
  std::vector<double> vals(n + 1);
  vals[0] = eval(pts[0]);
  for (int i = 0; i < n; ++i) {
    pts[i + 1](i) += initial_step;
    vals[i + 1] = eval(pts[i + 1]);
  }

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  std::vector<int> order(n + 1);
  while (best.evals < max_evals) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (int i = 0; i <= n; ++i) {
      p2[i] = pts[order[i]];
      v2[i] = vals[order[i]];
    }
    pts.swap(p2);
    vals.swap(v2);

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    Eigen::VectorXd xr = centroid + alpha * (centroid - pts[n]);
    double vr = eval(xr);
    if (vr < vals[0]) {
      Eigen::VectorXd xe = centroid + gamma * (centroid - pts[n]);
      double ve = eval(xe);
      if (ve < vr) {
        pts[n] = xe;
        vals[n] = ve;
      } else {
        pts[n] = xr;
        vals[n] = vr;
      }
    } else if (vr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = vr;
    } else {
      Eigen::VectorXd xc = centroid + rho * (pts[n] - centroid);
      double vc = eval(xc);
      if (vc < vals[n]) {
        pts[n] = xc;
        vals[n] = vc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + sigma * (pts[i] - pts[0]);
          vals[i] = eval(pts[i]);
          if (best.evals >= max_evals) break;
        }
      }
    }
  }
  return best;
}

}  // namespace mpsenc::detail
