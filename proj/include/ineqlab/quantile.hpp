#pragma once

// Piecewise-linear quantile functions of 1D measures and the exact
// quantile-coupling W2 between them.

#include <algorithm>
#include <vector>

#include "ineqlab/measure.hpp"

namespace ineqlab {

// Q(u) is linear on each mass segment (c[j-1], c[j]); grid cells become
// sloped segments, atoms become flat ones.
struct QuantileFunction {
  std::vector<double> c;      // cumulative masses, c.front() = 0, c.back() = 1
  std::vector<double> xlo;    // left endpoint of segment j
  std::vector<double> slope;  // dx/du on segment j

  static QuantileFunction from_grid(const GridSpec& g, const std::vector<double>& w) {
    require(g.dim == 1, "QuantileFunction: 1D grids only");
    QuantileFunction q;
    q.c.push_back(0.0);
    const double h = g.step(0);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      q.c.push_back(acc);
      q.xlo.push_back(g.coord(0, static_cast<int>(i)) - 0.5 * h);
      q.slope.push_back(h / w[i]);
    }
    require(!q.xlo.empty(), "QuantileFunction: empty measure");
    q.normalize();
    return q;
  }

  static QuantileFunction from_atoms(std::vector<double> x, std::vector<double> w) {
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    QuantileFunction q;
    q.c.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i : order) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      q.c.push_back(acc);
      q.xlo.push_back(x[i]);
      q.slope.push_back(0.0);
    }
    require(!q.xlo.empty(), "QuantileFunction: empty measure");
    q.normalize();
    return q;
  }

  void normalize() {
    const double total = c.back();
    require(total > 0.0, "QuantileFunction: zero total mass");
    for (auto& v : c) v /= total;
    c.back() = 1.0;
  }

  // Segment containing u (by midpoint convention the caller controls u).
  std::size_t segment(double u) const {
    auto it = std::upper_bound(c.begin(), c.end(), u);
    std::size_t j = static_cast<std::size_t>(it - c.begin());
    if (j == 0) j = 1;
    if (j > xlo.size()) j = xlo.size();
    return j - 1;
  }

  // Evaluation clamps u into segment j's own mass interval: tail cells whose
  // cumulative mass is at the resolution of double would otherwise extrapolate
  // along enormous slopes.
  double value_on(std::size_t j, double u) const {
    const double uc = std::min(std::max(u, c[j]), c[j + 1]);
    return xlo[j] + (uc - c[j]) * slope[j];
  }
};

// Exact integral of (Q1 - Q2)^2 over (0,1): both quantiles are linear between
// merged breakpoints, so Simpson is exact on each piece.
inline double quantile_w2_squared(const QuantileFunction& a, const QuantileFunction& b) {
  std::vector<double> cuts;
  cuts.reserve(a.c.size() + b.c.size());
  cuts.insert(cuts.end(), a.c.begin(), a.c.end());
  cuts.insert(cuts.end(), b.c.begin(), b.c.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double ua = cuts[k], ub = cuts[k + 1];
    const double du = ub - ua;
    if (du <= 0.0) continue;
    const double um = 0.5 * (ua + ub);
    const std::size_t ja = a.segment(um), jb = b.segment(um);
    const auto diff = [&](double u) { return a.value_on(ja, u) - b.value_on(jb, u); };
    total += du / 6.0 * (sqr(diff(ua)) + 4.0 * sqr(diff(um)) + sqr(diff(ub)));
  }
  return total;
}

namespace detail {

// Fine default grid for putting an analytic 1D Gaussian next to atoms.
inline GridSpec default_gaussian_grid(const GaussianAnalytic& g) {
  const double s = std::sqrt(g.cov(0, 0));
  return GridSpec::line(g.mean[0] - 10.0 * s, g.mean[0] + 10.0 * s, 4097);
}

inline QuantileFunction quantile_of(const Measure& m, const GridSpec* preferred) {
  if (const auto* g = m.grid()) return QuantileFunction::from_grid(g->grid, g->w);
  if (const auto* c = m.cloud()) {
    std::vector<double> x(c->w.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = c->points(static_cast<Eigen::Index>(i), 0);
    return QuantileFunction::from_atoms(std::move(x), c->w);
  }
  const auto* ga = m.gaussian();
  const GridSpec g = preferred ? *preferred : default_gaussian_grid(*ga);
  return QuantileFunction::from_grid(g, grid_masses(m, g));
}

}  // namespace detail

}  // namespace ineqlab
