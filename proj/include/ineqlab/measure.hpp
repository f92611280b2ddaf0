#pragma once

// Probability measures in three representations (analytic Gaussian, density
// on a grid, weighted particle cloud) plus the constructors that make them.

#include <memory>
#include <numeric>
#include <variant>
#include <vector>

#include "ineqlab/grid.hpp"
#include "ineqlab/potential.hpp"

namespace ineqlab {

struct GaussianAnalytic {
  Vec mean;
  Mat cov;
  int dim() const { return static_cast<int>(mean.size()); }
};

struct GridDensity {
  GridSpec grid;
  std::vector<double> w;  // node masses, sum 1
};

struct ParticleCloud {
  Mat points;  // count x dim
  std::vector<double> w;
};

struct Measure {
  std::variant<GaussianAnalytic, GridDensity, ParticleCloud> rep;
  std::shared_ptr<const Potential> potential;  // generating potential when known
  int factors = 1;  // measure is the factors-fold tensor power of rep

  const GaussianAnalytic* gaussian() const { return std::get_if<GaussianAnalytic>(&rep); }
  const GridDensity* grid() const { return std::get_if<GridDensity>(&rep); }
  const ParticleCloud* cloud() const { return std::get_if<ParticleCloud>(&rep); }

  int base_dim() const {
    if (auto* g = gaussian()) return g->dim();
    if (auto* g = grid()) return g->grid.dim;
    return static_cast<int>(cloud()->points.cols());
  }
  int dim() const { return factors * base_dim(); }
};

inline Measure build_gaussian(const Vec& mean, const Mat& cov) {
  Measure m;
  m.rep = GaussianAnalytic{mean, cov};
  m.potential = std::make_shared<Potential>(make_gaussian_potential(mean, cov));
  return m;
}

inline Measure build_standard_gaussian(int dim) {
  return build_gaussian(Vec::Zero(dim), Mat::Identity(dim, dim));
}

namespace detail {

inline bool is_standard_gaussian(const Measure& mu) {
  if (const auto* g = mu.gaussian()) {
    return g->mean.isZero(1e-12) && g->cov.isIdentity(1e-12);
  }
  if (mu.grid() && mu.potential && mu.potential->quadratic) {
    const auto& q = *mu.potential->quadratic;
    return q.center.isZero(1e-12) && q.Q.isIdentity(1e-12) && q.constant == 0.0;
  }
  return false;
}

inline double require_convexity_lower(const Measure& mu, const char* who) {
  require(mu.potential && mu.potential->convexity_lower,
          std::string(who) + ": reference potential must declare a convexity lower bound");
  const double R = *mu.potential->convexity_lower;
  require(R > 0.0, std::string(who) + ": declared convexity lower bound must be positive");
  return R;
}

// Upper estimate of the mass outside the box, from the log-concave tail bound
// int_L^inf e^{-V} <= e^{-V(L)} / dV/dn(L) per boundary node.
inline double boundary_tail_estimate(const Potential& V, const GridSpec& g,
                                     const std::vector<double>& density) {
  double tail = 0.0;
  const auto outward_rate = [&](std::size_t flat, int axis, double sign) {
    Vec x = g.node(flat);
    const double h = g.step(axis);
    Vec xin = x;
    xin[axis] -= sign * h;
    const double slope = (V.value(x) - V.value(xin)) / h;
    return slope;
  };
  if (g.dim == 1) {
    for (int side = 0; side < 2; ++side) {
      const std::size_t flat = side == 0 ? 0 : g.size() - 1;
      const double s = outward_rate(flat, 0, side == 0 ? -1.0 : 1.0);
      if (s <= 0.0) return std::numeric_limits<double>::infinity();
      tail += density[flat] / s;
    }
    return tail;
  }
  const int nx = g.count[0], ny = g.count[1];
  const auto flat_of = [&](int ix, int iy) { return static_cast<std::size_t>(ix) * ny + iy; };
  for (int iy = 0; iy < ny; ++iy) {
    for (int side = 0; side < 2; ++side) {
      const std::size_t f = flat_of(side == 0 ? 0 : nx - 1, iy);
      const double s = outward_rate(f, 0, side == 0 ? -1.0 : 1.0);
      if (s <= 0.0) return std::numeric_limits<double>::infinity();
      tail += density[f] * g.step(1) / s;
    }
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int side = 0; side < 2; ++side) {
      const std::size_t f = flat_of(ix, side == 0 ? 0 : ny - 1);
      const double s = outward_rate(f, 1, side == 0 ? -1.0 : 1.0);
      if (s <= 0.0) return std::numeric_limits<double>::infinity();
      tail += density[f] * g.step(0) / s;
    }
  }
  return tail;
}

}  // namespace detail

// Discretize e^{-V} on the grid; rejects boxes that truncate more than
// kTailEpsilon of the mass.
inline Measure build_from_potential(const Potential& V, const GridSpec& g) {
  require(V.dim == g.dim, "build_from_potential: dimension mismatch");
  const std::size_t n = g.size();
  std::vector<double> density(n);
  double vmin = std::numeric_limits<double>::infinity();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = V.value(g.node(i));
    require(std::isfinite(vals[i]), "build_from_potential: potential not finite on grid");
    vmin = std::min(vmin, vals[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    density[i] = std::exp(-(vals[i] - vmin));
    z += density[i];
  }
  const double vol = g.cell_volume();
  z *= vol;
  for (auto& d : density) d /= z;  // density relative to the boxed normalization

  const double tail = detail::boundary_tail_estimate(V, g, density);
  require(tail <= kTailEpsilon,
          "build_from_potential: grid box truncates an estimated relative mass of " +
              std::to_string(tail) + " > 1e-9; enlarge the box");

  GridDensity gd;
  gd.grid = g;
  gd.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) gd.w[i] = density[i] * vol;
  Measure m;
  m.rep = std::move(gd);
  m.potential = std::make_shared<Potential>(V);
  return m;
}

// N-fold tensor power, tracked by the product flag so functionals stay
// additive without ever materializing a product grid.  Materialization is
// available for Gaussians (block diagonal) and for squaring a 1D grid.
inline Measure tensor_power(const Measure& m, int N, bool materialize = false) {
  require(N >= 1, "tensor_power: N must be >= 1");
  require(m.gaussian() || (m.grid() && m.base_dim() == 1),
          "tensor_power: supported for GaussianAnalytic or 1D GridDensity");
  if (N == 1) return m;
  if (!materialize) {
    Measure out = m;
    out.factors = m.factors * N;
    return out;
  }
  require(m.factors == 1, "tensor_power: cannot materialize an already flagged product");
  require(static_cast<long>(N) * m.base_dim() <= 3,
          "tensor_power: refusing to materialize a product grid with N*dim > 3");
  if (const auto* g = m.gaussian()) {
    const int n = g->dim();
    Vec mean(N * n);
    Mat cov = Mat::Zero(N * n, N * n);
    for (int k = 0; k < N; ++k) {
      mean.segment(k * n, n) = g->mean;
      cov.block(k * n, k * n, n, n) = g->cov;
    }
    return build_gaussian(mean, cov);
  }
  const auto* gd = m.grid();
  require(N == 2, "tensor_power: grid materialization supports N = 2 only");
  const GridSpec& g1 = gd->grid;
  GridSpec g2 = GridSpec::plane(g1.lo[0], g1.hi[0], g1.count[0], g1.lo[0], g1.hi[0], g1.count[0]);
  GridDensity out;
  out.grid = g2;
  out.w.resize(g2.size());
  const int n1 = g1.count[0];
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) out.w[static_cast<std::size_t>(i) * n1 + j] = gd->w[i] * gd->w[j];
  Measure res;
  res.rep = std::move(out);
  return res;
}

// Reweight a grid measure by 1 + eps*g and renormalize.
inline Measure perturb_density(const Measure& m, const ScalarField& g, double eps) {
  const auto* gd = m.grid();
  require(gd, "perturb_density: grid measures only");
  require(m.factors == 1, "perturb_density: not available on product-flagged measures");
  GridDensity out = *gd;
  double z = 0.0;
  for (std::size_t i = 0; i < out.w.size(); ++i) {
    const double f = 1.0 + eps * g(out.grid.node(i));
    require(f > 0.0, "perturb_density: 1 + eps*g must stay positive");
    out.w[i] *= f;
    z += out.w[i];
  }
  for (auto& w : out.w) w /= z;
  Measure res;
  res.rep = std::move(out);
  return res;
}

// Masses of a measure projected on a given grid (used to compare analytic
// measures with grid measures on the grid's own footing).
inline std::vector<double> grid_masses(const Measure& m, const GridSpec& g) {
  if (const auto* gd = m.grid()) {
    require(gd->grid == g, "grid_masses: measure lives on a different grid");
    return gd->w;
  }
  const auto* ga = m.gaussian();
  require(ga && m.factors == 1, "grid_masses: unsupported representation");
  require(ga->dim() == g.dim, "grid_masses: dimension mismatch");
  const Potential p = make_gaussian_potential(ga->mean, ga->cov);
  std::vector<double> w(g.size());
  double z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    w[i] = std::exp(-p.value(g.node(i)));
    z += w[i];
  }
  for (auto& x : w) x /= z;
  return w;
}

}  // namespace ineqlab
