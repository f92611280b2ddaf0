#pragma once

// W2 distance with selectable backends: closed form for Gaussian pairs,
// exact quantile coupling in 1D, debiased entropic transport otherwise.

#include "ineqlab/functionals.hpp"
#include "ineqlab/quantile.hpp"
#include "ineqlab/sinkhorn.hpp"

namespace ineqlab {

enum class W2Backend { automatic, gaussian, quantile1d, entropic };

namespace detail {

inline double bures_w2_squared(const GaussianAnalytic& a, const GaussianAnalytic& b) {
  Eigen::SelfAdjointEigenSolver<Mat> esb(b.cov);
  require(esb.info() == Eigen::Success, "wasserstein2: covariance eigensolve failed");
  const Mat sb = esb.operatorSqrt();
  Eigen::SelfAdjointEigenSolver<Mat> esm(Mat(sb * a.cov * sb));
  require(esm.info() == Eigen::Success, "wasserstein2: cross-term eigensolve failed");
  double cross = 0.0;
  for (Eigen::Index i = 0; i < esm.eigenvalues().size(); ++i)
    cross += std::sqrt(std::max(esm.eigenvalues()[i], 0.0));
  return (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * cross;
}

// Point-set view of a measure for the entropic backend.
inline void support_points(const Measure& m, Mat& pts, std::vector<double>& w) {
  if (const auto* g = m.grid()) {
    pts.resize(static_cast<Eigen::Index>(g->w.size()), g->grid.dim);
    for (std::size_t i = 0; i < g->w.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = g->grid.node(i).transpose();
    w = g->w;
    return;
  }
  if (const auto* c = m.cloud()) {
    pts = c->points;
    w = c->w;
    return;
  }
  const auto* ga = m.gaussian();
  require(ga->dim() == 1, "entropic backend: analytic Gaussians are discretized in 1D only");
  const GridSpec g = default_gaussian_grid(*ga);
  pts.resize(static_cast<Eigen::Index>(g.size()), 1);
  for (std::size_t i = 0; i < g.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = g.coord(0, static_cast<int>(i));
  w = grid_masses(m, g);
}

inline double w2_squared_base(const Measure& nu, const Measure& mu, W2Backend backend) {
  const int n = nu.base_dim();
  require(n == mu.base_dim(), "wasserstein2: dimension mismatch");
  const bool both_gaussian = nu.gaussian() && mu.gaussian();

  if (backend == W2Backend::automatic) {
    if (both_gaussian) backend = W2Backend::gaussian;
    else if (n == 1) backend = W2Backend::quantile1d;
    else if (nu.cloud() && mu.gaussian()) backend = W2Backend::gaussian;  // moment proxy
    else backend = W2Backend::entropic;
  }

  switch (backend) {
    case W2Backend::gaussian: {
      if (both_gaussian) return bures_w2_squared(*nu.gaussian(), *mu.gaussian());
      // moment-matched proxy, used for near-Gaussian particle clouds
      require(nu.cloud() || mu.cloud(), "gaussian backend: needs Gaussian or cloud inputs");
      const GaussianAnalytic ga{mean_vector(nu), covariance_matrix(nu)};
      const GaussianAnalytic gb{mean_vector(mu), covariance_matrix(mu)};
      return bures_w2_squared(ga, gb);
    }
    case W2Backend::quantile1d: {
      require(n == 1, "quantile1d backend: one-dimensional measures only");
      if (both_gaussian) {
        // the monotone coupling of two Gaussians is affine
        const double dm = nu.gaussian()->mean[0] - mu.gaussian()->mean[0];
        const double ds = std::sqrt(nu.gaussian()->cov(0, 0)) - std::sqrt(mu.gaussian()->cov(0, 0));
        return dm * dm + ds * ds;
      }
      const GridSpec* shared = nullptr;
      if (nu.grid()) shared = &nu.grid()->grid;
      else if (mu.grid()) shared = &mu.grid()->grid;
      const QuantileFunction qa = quantile_of(nu, shared);
      const QuantileFunction qb = quantile_of(mu, shared);
      return quantile_w2_squared(qa, qb);
    }
    case W2Backend::entropic: {
      Mat xa, xb;
      std::vector<double> wa, wb;
      support_points(nu, xa, wa);
      support_points(mu, xb, wb);
      return entropic_w2_squared(xa, wa, xb, wb).w2_squared;
    }
    default:
      fail("wasserstein2: unknown backend");
  }
}

}  // namespace detail

inline double wasserstein2_squared(const Measure& nu, const Measure& mu,
                                   W2Backend backend = W2Backend::automatic) {
  require(nu.factors == mu.factors, "wasserstein2: tensor factors must match");
  Measure a = nu, b = mu;
  a.factors = b.factors = 1;
  const double base = detail::w2_squared_base(a, b, backend);
  return nu.factors * std::max(base, 0.0);
}

inline double wasserstein2(const Measure& nu, const Measure& mu,
                           W2Backend backend = W2Backend::automatic) {
  return std::sqrt(wasserstein2_squared(nu, mu, backend));
}

}  // namespace ineqlab
