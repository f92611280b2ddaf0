#pragma once

// Log-domain Sinkhorn with geometric epsilon annealing and debiasing.

#include <vector>

#include "ineqlab/common.hpp"

namespace ineqlab {

struct SinkhornOptions {
  double eps_start_rel = 1.0;    // relative to the mean transport cost
  double eps_floor_rel = 1e-3;
  double anneal_factor = 0.5;
  int max_iterations = 10000;    // per epsilon level
  double marginal_tol = 1e-9;    // L1 error of the free marginal
};

struct SinkhornResult {
  double w2_squared = 0.0;  // debiased
  double eps_floor = 0.0;
  int iterations = 0;
  double marginal_error = 0.0;
  bool converged = true;
};

namespace detail {

// Dual value of the entropic problem at the annealing floor, with potentials
// warm-started across levels.
struct EntropicDual {
  double value;
  int iterations;
  double marginal_error;
  bool converged;
};

inline EntropicDual entropic_dual(const Mat& cost, const std::vector<double>& a,
                                  const std::vector<double>& b, double eps_start, double eps_floor,
                                  const SinkhornOptions& opt) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  std::vector<double> f(n, 0.0), g(m, 0.0), loga(n), logb(m);
  for (int i = 0; i < n; ++i) loga[i] = std::log(std::max(a[i], kDensityFloor));
  for (int j = 0; j < m; ++j) logb[j] = std::log(std::max(b[j], kDensityFloor));

  int total_iter = 0;
  double marg_err = 0.0;
  bool converged = false;
  double eps = eps_start;
  while (true) {
    eps = std::max(eps, eps_floor);
    converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
      ++total_iter;
      for (int j = 0; j < m; ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) mx = std::max(mx, (f[i] - cost(i, j)) / eps + loga[i]);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::exp((f[i] - cost(i, j)) / eps + loga[i] - mx);
        g[j] = -eps * (mx + std::log(s));
      }
      for (int i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) mx = std::max(mx, (g[j] - cost(i, j)) / eps + logb[j]);
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += std::exp((g[j] - cost(i, j)) / eps + logb[j] - mx);
        f[i] = -eps * (mx + std::log(s));
      }
      // rows are exact after the f-update; measure the column error
      marg_err = 0.0;
      for (int j = 0; j < m; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i)
          col += std::exp((f[i] + g[j] - cost(i, j)) / eps + loga[i] + logb[j]);
        marg_err += std::abs(col - b[j]);
      }
      if (marg_err < opt.marginal_tol) {
        converged = true;
        break;
      }
    }
    if (eps <= eps_floor) break;
    eps *= opt.anneal_factor;
  }
  double dual = 0.0;
  for (int i = 0; i < n; ++i) dual += a[i] * f[i];
  for (int j = 0; j < m; ++j) dual += b[j] * g[j];
  return {dual, total_iter, marg_err, converged};
}

inline Mat pairwise_sq_cost(const Mat& x, const Mat& y) {
  const Eigen::Index n = x.rows(), m = y.rows();
  require(n * m <= 4200000, "entropic backend: support pair too large (> 4.2e6 cost entries)");
  Mat c(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = (x.row(i) - y.row(j)).squaredNorm();
  return c;
}

}  // namespace detail

// Debiased entropic W2^2 between weighted point sets (rows of x and y).
inline SinkhornResult entropic_w2_squared(const Mat& x, const std::vector<double>& a, const Mat& y,
                                          const std::vector<double>& b,
                                          const SinkhornOptions& opt = {}) {
  const Mat cxy = detail::pairwise_sq_cost(x, y);
  double mean_cost = 0.0;
  for (Eigen::Index i = 0; i < cxy.rows(); ++i)
    for (Eigen::Index j = 0; j < cxy.cols(); ++j) mean_cost += a[i] * b[j] * cxy(i, j);
  mean_cost = std::max(mean_cost, 1e-12);
  const double eps0 = opt.eps_start_rel * mean_cost;
  const double floor = opt.eps_floor_rel * mean_cost;

  const auto xy = detail::entropic_dual(cxy, a, b, eps0, floor, opt);
  const auto xx = detail::entropic_dual(detail::pairwise_sq_cost(x, x), a, a, eps0, floor, opt);
  const auto yy = detail::entropic_dual(detail::pairwise_sq_cost(y, y), b, b, eps0, floor, opt);

  SinkhornResult r;
  r.w2_squared = xy.value - 0.5 * xx.value - 0.5 * yy.value;
  r.eps_floor = floor;
  r.iterations = xy.iterations + xx.iterations + yy.iterations;
  r.marginal_error = std::max({xy.marginal_error, xx.marginal_error, yy.marginal_error});
  r.converged = xy.converged && xx.converged && yy.converged;
  require(r.converged, "entropic backend: Sinkhorn failed to reach the marginal tolerance (final L1 error " +
                           std::to_string(r.marginal_error) + ")");
  return r;
}

}  // namespace ineqlab
