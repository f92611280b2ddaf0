#pragma once

// Information functionals: relative entropy, Lebesgue entropy, Fisher
// information, variance, moments, and the quadratures behind them.

#include <vector>

#include "ineqlab/gauss_hermite.hpp"
#include "ineqlab/measure.hpp"

namespace ineqlab {

namespace detail {

inline int gh_order_for(int dim) {
  switch (dim) {
    case 1: return 80;
    case 2: return 48;
    case 3: return 24;
    default: return 10;  // still exact for polynomials of degree < 19
  }
}

// Sample points and weights representing the measure for quadrature.
struct Quadrature {
  std::vector<Vec> x;
  std::vector<double> w;
};

inline Quadrature quadrature_of(const Measure& m) {
  require(m.factors == 1, "quadrature: product-flagged measures must go through the additive paths");
  Quadrature q;
  if (const auto* g = m.gaussian()) {
    const int n = g->dim();
    Eigen::LLT<Mat> llt(g->cov);
    require(llt.info() == Eigen::Success, "quadrature: covariance not positive definite");
    const Mat L = llt.matrixL();
    const auto& rule = gauss_hermite(gh_order_for(n));
    const int K = static_cast<int>(rule.node.size());
    std::vector<int> idx(n, 0);
    Vec z(n);
    while (true) {
      double w = 1.0;
      for (int k = 0; k < n; ++k) {
        z[k] = rule.node[idx[k]];
        w *= rule.weight[idx[k]];
      }
      q.x.push_back(g->mean + L * z);
      q.w.push_back(w);
      int k = 0;
      for (; k < n; ++k) {
        if (++idx[k] < K) break;
        idx[k] = 0;
      }
      if (k == n) break;
    }
    return q;
  }
  if (const auto* g = m.grid()) {
    q.x.reserve(g->w.size());
    q.w = g->w;
    for (std::size_t i = 0; i < g->w.size(); ++i) q.x.push_back(g->grid.node(i));
    return q;
  }
  const auto* c = m.cloud();
  q.w = c->w;
  q.x.reserve(c->points.rows());
  for (Eigen::Index i = 0; i < c->points.rows(); ++i) q.x.push_back(c->points.row(i).transpose());
  return q;
}

inline double floored_log(double w) { return std::log(std::max(w, kDensityFloor)); }

}  // namespace detail

// int f dmu.  Particle clouds require at least 99.9% of the mass to map to
// finite values; the finite part is renormalized.
inline double integrate(const ScalarField& f, const Measure& mu) {
  const auto q = detail::quadrature_of(mu);
  if (mu.cloud()) {
    double s = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      const double v = f(q.x[i]);
      if (std::isfinite(v)) {
        s += q.w[i] * v;
        mass += q.w[i];
      }
    }
    require(mass >= 0.999, "integrate: more than 0.1% of the cloud mass maps to non-finite values");
    return s / mass;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * f(q.x[i]);
  return s;
}

struct VarianceResult {
  double variance;
  double mean;
};

inline VarianceResult variance(const ScalarField& f, const Measure& mu) {
  const auto q = detail::quadrature_of(mu);
  std::vector<double> vals(q.x.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    vals[i] = f(q.x[i]);
    mean += q.w[i] * vals[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) var += q.w[i] * sqr(vals[i] - mean);
  return VarianceResult{var, mean};
}

inline Vec mean_vector(const Measure& m) {
  require(m.factors == 1, "mean_vector: base representations only");
  if (const auto* g = m.gaussian()) return g->mean;
  const auto q = detail::quadrature_of(m);
  Vec s = Vec::Zero(m.base_dim());
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * q.x[i];
  return s;
}

inline Mat covariance_matrix(const Measure& m) {
  require(m.factors == 1, "covariance_matrix: base representations only");
  if (const auto* g = m.gaussian()) return g->cov;
  const auto q = detail::quadrature_of(m);
  const Vec mean = mean_vector(m);
  Mat s = Mat::Zero(m.base_dim(), m.base_dim());
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const Vec d = q.x[i] - mean;
    s += q.w[i] * d * d.transpose();
  }
  return s;
}

inline double second_moment(const Measure& m) {
  if (const auto* g = m.gaussian())
    return m.factors * (g->mean.squaredNorm() + g->cov.trace());
  Measure base = m;
  base.factors = 1;
  double s = 0.0;
  const auto q = detail::quadrature_of(base);
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * q.x[i].squaredNorm();
  return m.factors * s;
}

namespace detail {

inline double gaussian_relative_entropy(const GaussianAnalytic& nu, const GaussianAnalytic& mu) {
  const int n = nu.dim();
  Eigen::LLT<Mat> llt(mu.cov);
  require(llt.info() == Eigen::Success, "relative_entropy: reference covariance not SPD");
  const Mat Q = llt.solve(Mat::Identity(n, n));
  const Vec d = nu.mean - mu.mean;
  Eigen::LLT<Mat> lltn(nu.cov);
  require(lltn.info() == Eigen::Success, "relative_entropy: covariance not SPD");
  double logdet_ratio = 0.0;
  for (int i = 0; i < n; ++i)
    logdet_ratio += 2.0 * (std::log(llt.matrixL()(i, i)) - std::log(lltn.matrixL()(i, i)));
  return 0.5 * ((Q * nu.cov).trace() - n + d.dot(Q * d) + logdet_ratio);
}

inline double gaussian_fisher(const GaussianAnalytic& nu, const GaussianAnalytic& mu) {
  const int n = nu.dim();
  const Mat Q = mu.cov.llt().solve(Mat::Identity(n, n));
  const Mat P = nu.cov.llt().solve(Mat::Identity(n, n));
  const Vec d = nu.mean - mu.mean;
  const Mat D = Q - P;
  return (Q * d).squaredNorm() + (D * nu.cov * D).trace();
}

// Put nu and mu on a common grid; errors when impossible.
struct CommonGrid {
  GridSpec grid;
  std::vector<double> wnu, wmu;
};

inline CommonGrid common_grid(const Measure& nu, const Measure& mu) {
  const GridSpec* g = nullptr;
  if (nu.grid()) g = &nu.grid()->grid;
  if (mu.grid()) {
    require(!g || mu.grid()->grid == *g, "functionals: grids of nu and mu differ");
    if (!g) g = &mu.grid()->grid;
  }
  require(g, "functionals: no grid representation available");
  return CommonGrid{*g, grid_masses(nu, *g), grid_masses(mu, *g)};
}

// Per-axis central differences of a node function, one-sided where the
// support mask ends; entries outside the mask are zero.
inline std::vector<Vec> grid_gradient(const GridSpec& g, const std::vector<double>& f,
                                      const std::vector<char>& mask) {
  const std::size_t n = g.size();
  std::vector<Vec> grad(n, Vec::Zero(g.dim));
  const int ny = g.dim == 2 ? g.count[1] : 1;
  const auto neighbor = [&](std::size_t i, int axis, int dir) -> long {
    const long stride = axis == 0 ? ny : 1;
    const int extent = g.count[axis];
    long pos = axis == 0 ? static_cast<long>(i) / ny : static_cast<long>(i) % ny;
    pos += dir;
    if (pos < 0 || pos >= extent) return -1;
    return static_cast<long>(i) + dir * stride;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    for (int axis = 0; axis < g.dim; ++axis) {
      const double h = g.step(axis);
      long up = neighbor(i, axis, +1);
      long dn = neighbor(i, axis, -1);
      if (up >= 0 && !mask[up]) up = -1;
      if (dn >= 0 && !mask[dn]) dn = -1;
      if (up >= 0 && dn >= 0)
        grad[i][axis] = (f[up] - f[dn]) / (2.0 * h);
      else if (up >= 0)
        grad[i][axis] = (f[up] - f[i]) / h;
      else if (dn >= 0)
        grad[i][axis] = (f[i] - f[dn]) / h;
    }
  }
  return grad;
}

inline std::vector<char> support_mask(const std::vector<double>& w) {
  double wmax = 0.0;
  for (double v : w) wmax = std::max(wmax, v);
  std::vector<char> mask(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) mask[i] = w[i] > kSupportCut * wmax;
  return mask;
}

}  // namespace detail

// H(nu|mu) = int log(dnu/dmu) dnu; requires nu absolutely continuous w.r.t. mu.
inline double relative_entropy(const Measure& nu, const Measure& mu) {
  require(nu.factors == mu.factors, "relative_entropy: tensor factors must match");
  require(nu.base_dim() == mu.base_dim(), "relative_entropy: dimension mismatch");
  const int k = nu.factors;
  if (nu.gaussian() && mu.gaussian())
    return k * detail::gaussian_relative_entropy(*nu.gaussian(), *mu.gaussian());
  if (nu.cloud() && mu.gaussian()) {
    Measure proxy = build_gaussian(mean_vector(nu), covariance_matrix(nu));
    return k * detail::gaussian_relative_entropy(*proxy.gaussian(), *mu.gaussian());
  }
  const auto cg = detail::common_grid(nu, mu);
  double h = 0.0;
  for (std::size_t i = 0; i < cg.wnu.size(); ++i) {
    if (cg.wnu[i] <= 0.0) continue;
    require(cg.wmu[i] > 0.0, "relative_entropy: nu is not absolutely continuous w.r.t. mu on the grid");
    h += cg.wnu[i] * (detail::floored_log(cg.wnu[i]) - detail::floored_log(cg.wmu[i]));
  }
  return k * h;
}

// Ent_dx(m) = int rho log rho dx.
inline double entropy_dx(const Measure& m) {
  const int k = m.factors;
  if (const auto* g = m.gaussian()) {
    const int n = g->dim();
    Eigen::LLT<Mat> llt(g->cov);
    require(llt.info() == Eigen::Success, "entropy_dx: covariance not SPD");
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return k * (-0.5 * n * std::log(2.0 * M_PI * M_E) - 0.5 * logdet);
  }
  const auto* g = m.grid();
  require(g, "entropy_dx: not defined for particle clouds");
  const double logvol = std::log(g->grid.cell_volume());
  double s = 0.0;
  for (double w : g->w)
    if (w > 0.0) s += w * (detail::floored_log(w) - logvol);
  return k * s;
}

// I(nu|mu) = int |grad log(dnu/dmu)|^2 dnu.
inline double fisher_information(const Measure& nu, const Measure& mu) {
  require(nu.factors == mu.factors, "fisher_information: tensor factors must match");
  require(nu.base_dim() == mu.base_dim(), "fisher_information: dimension mismatch");
  const int k = nu.factors;
  if (nu.gaussian() && mu.gaussian())
    return k * detail::gaussian_fisher(*nu.gaussian(), *mu.gaussian());
  if (nu.cloud() && mu.gaussian()) {
    Measure proxy = build_gaussian(mean_vector(nu), covariance_matrix(nu));
    return k * detail::gaussian_fisher(*proxy.gaussian(), *mu.gaussian());
  }
  const auto cg = detail::common_grid(nu, mu);
  const auto mask = detail::support_mask(cg.wnu);
  std::vector<double> logratio(cg.wnu.size(), 0.0);
  for (std::size_t i = 0; i < cg.wnu.size(); ++i) {
    if (!mask[i]) continue;
    require(cg.wmu[i] > 0.0, "fisher_information: nu not absolutely continuous w.r.t. mu");
    logratio[i] = detail::floored_log(cg.wnu[i]) - detail::floored_log(cg.wmu[i]);
  }
  const auto grad = detail::grid_gradient(cg.grid, logratio, mask);
  double s = 0.0;
  for (std::size_t i = 0; i < cg.wnu.size(); ++i)
    if (mask[i]) s += cg.wnu[i] * grad[i].squaredNorm();
  return k * s;
}

// nu(V) with the closed form for Gaussian measures under quadratic V.
inline double integrate_potential(const Potential& V, const Measure& nu) {
  require(V.dim == nu.base_dim(), "integrate_potential: dimension mismatch");
  const int k = nu.factors;
  if (const auto* g = nu.gaussian()) {
    if (V.quadratic) {
      const auto& q = *V.quadratic;
      const Vec d = g->mean - q.center;
      return k * (0.5 * ((q.Q * g->cov).trace() + d.dot(q.Q * d)) + q.constant + V.beta);
    }
  }
  Measure base = nu;
  base.factors = 1;
  return k * integrate(ScalarField{[&V](const Vec& x) { return V.value(x); }, nullptr}, base);
}

namespace detail {

// Integrals entering the scale-optimized logarithmic Sobolev form:
//   a = int |grad V|^2 dnu,  b = int grad V . grad f dnu,  c = I(nu|mu),
// where f = log(dnu/dmu).
struct PairGradientIntegrals {
  double a, b, c;
};

inline PairGradientIntegrals pair_gradient_integrals(const Measure& nu, const Measure& mu) {
  require(nu.factors == 1 && mu.factors == 1, "pair_gradient_integrals: base representations only");
  require(mu.potential, "pair_gradient_integrals: reference must carry a potential");
  const Potential& V = *mu.potential;
  if (nu.gaussian() && mu.gaussian() && V.quadratic) {
    const auto& ga = *nu.gaussian();
    const auto& gm = *mu.gaussian();
    const int n = ga.dim();
    const Mat Q = V.quadratic->Q;
    const Mat P = ga.cov.llt().solve(Mat::Identity(n, n));
    const Vec d = ga.mean - V.quadratic->center;
    const double a = (Q * d).squaredNorm() + (Q * ga.cov * Q.transpose()).trace();
    const double c = gaussian_fisher(ga, gm);
    const double b = a - (Q * P * ga.cov).trace();
    return {a, b, c};
  }
  const auto cg = common_grid(nu, mu);
  const auto mask = support_mask(cg.wnu);
  std::vector<double> logratio(cg.wnu.size(), 0.0);
  for (std::size_t i = 0; i < cg.wnu.size(); ++i) {
    if (!mask[i]) continue;
    require(cg.wmu[i] > 0.0, "pair_gradient_integrals: nu not absolutely continuous w.r.t. mu");
    logratio[i] = floored_log(cg.wnu[i]) - floored_log(cg.wmu[i]);
  }
  const auto grad = grid_gradient(cg.grid, logratio, mask);
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < cg.wnu.size(); ++i) {
    if (!mask[i]) continue;
    const Vec gv = V.grad(cg.grid.node(i));
    a += cg.wnu[i] * gv.squaredNorm();
    b += cg.wnu[i] * gv.dot(grad[i]);
    c += cg.wnu[i] * grad[i].squaredNorm();
  }
  return {a, b, c};
}

}  // namespace detail

}  // namespace ineqlab
