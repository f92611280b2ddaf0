#pragma once

// Monotone transport maps, couplings, and entropy along displacement
// geodesics.

#include <variant>
#include <vector>

#include "ineqlab/wasserstein.hpp"

namespace ineqlab {

struct AffinePlan {
  Mat A;  // symmetric positive definite
  Vec b;  // T(x) = A x + b
};

struct Monotone1DPlan {
  GridSpec grid;            // source grid
  std::vector<double> map;  // T at source nodes, nondecreasing on the support
  std::vector<char> mask;   // support of the source weights
};

struct DiscreteCouplingPlan {
  std::vector<double> source_x, target_x, mass;  // monotone coupling atoms
};

struct TransportPlan {
  std::variant<AffinePlan, Monotone1DPlan, DiscreteCouplingPlan> rep;
  double cost = 0.0;  // int |T(x)-x|^2 dmu0 = W2^2

  const AffinePlan* affine() const { return std::get_if<AffinePlan>(&rep); }
  const Monotone1DPlan* monotone() const { return std::get_if<Monotone1DPlan>(&rep); }
  const DiscreteCouplingPlan* coupling() const { return std::get_if<DiscreteCouplingPlan>(&rep); }
};

namespace detail {

inline TransportPlan affine_transport(const GaussianAnalytic& s, const GaussianAnalytic& t) {
  Eigen::SelfAdjointEigenSolver<Mat> ess(s.cov);
  require(ess.info() == Eigen::Success, "brenier_transport: source covariance eigensolve failed");
  const Mat sh = ess.operatorSqrt();
  const Mat shinv = ess.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<Mat> esm(Mat(sh * t.cov * sh));
  require(esm.info() == Eigen::Success, "brenier_transport: cross covariance eigensolve failed");
  const Mat mid = esm.operatorSqrt();
  Mat A = shinv * mid * shinv;
  A = 0.5 * (A + A.transpose());
  TransportPlan plan;
  plan.rep = AffinePlan{A, Vec(t.mean - A * s.mean)};
  plan.cost = bures_w2_squared(t, s);
  return plan;
}

}  // namespace detail

// Monotone (Brenier) transport from source to target.
inline TransportPlan brenier_transport(const Measure& source, const Measure& target) {
  require(source.factors == 1 && target.factors == 1, "brenier_transport: base measures only");
  require(source.base_dim() == target.base_dim(), "brenier_transport: dimension mismatch");
  if (source.gaussian() && target.gaussian())
    return detail::affine_transport(*source.gaussian(), *target.gaussian());

  if (source.cloud() && target.cloud()) {
    require(source.base_dim() == 1, "brenier_transport: discrete couplings are 1D only");
    const QuantileFunction qa = detail::quantile_of(source, nullptr);
    const QuantileFunction qb = detail::quantile_of(target, nullptr);
    DiscreteCouplingPlan cp;
    std::vector<double> cuts;
    cuts.insert(cuts.end(), qa.c.begin(), qa.c.end());
    cuts.insert(cuts.end(), qb.c.begin(), qb.c.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double cost = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double du = cuts[k + 1] - cuts[k];
      if (du <= 0.0) continue;
      const double um = 0.5 * (cuts[k] + cuts[k + 1]);
      const double xs = qa.value_on(qa.segment(um), um);
      const double xt = qb.value_on(qb.segment(um), um);
      cp.source_x.push_back(xs);
      cp.target_x.push_back(xt);
      cp.mass.push_back(du);
      cost += du * sqr(xs - xt);
    }
    TransportPlan plan;
    plan.rep = std::move(cp);
    plan.cost = cost;
    return plan;
  }

  require(source.base_dim() == 1, "brenier_transport: grid transport is 1D only");
  GridSpec grid;
  if (source.grid()) grid = source.grid()->grid;
  else if (source.gaussian() && target.grid()) grid = target.grid()->grid;
  else if (source.gaussian()) grid = detail::default_gaussian_grid(*source.gaussian());
  else fail("brenier_transport: unsupported source representation");
  const std::vector<double> w0 = grid_masses(source, grid);
  const GridSpec* gs = &grid;
  const QuantileFunction qt = detail::quantile_of(target, gs);

  Monotone1DPlan mp;
  mp.grid = *gs;
  mp.mask = detail::support_mask(w0);
  mp.map.assign(w0.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < w0.size(); ++i) {
    const double u = std::min(1.0, std::max(0.0, acc + 0.5 * w0[i]));
    acc += w0[i];
    // beyond quantile resolution the map degenerates; drop those tail nodes
    if (u < 1e-13 || u > 1.0 - 1e-13) mp.mask[i] = 0;
    mp.map[i] = qt.value_on(qt.segment(u), u);
  }
  for (std::size_t i = 0; i + 1 < mp.map.size(); ++i)
    if (mp.mask[i] && mp.mask[i + 1])
      require(mp.map[i + 1] >= mp.map[i] - 1e-12, "brenier_transport: map is not monotone");

  TransportPlan plan;
  plan.cost = wasserstein2_squared(source, target, W2Backend::quantile1d);
  plan.rep = std::move(mp);
  return plan;
}

struct GeodesicProfile {
  std::vector<double> s;
  std::vector<double> psi;  // Ent_dx along the displacement geodesic
  TransportPlan plan;
  int dim = 1;
};

namespace detail {

// d(T)/dx at source nodes by central differences inside the support.
inline std::vector<double> map_derivative(const Monotone1DPlan& p) {
  const double h = p.grid.step(0);
  const std::size_t n = p.map.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.mask[i]) continue;
    const bool up = i + 1 < n && p.mask[i + 1];
    const bool dn = i > 0 && p.mask[i - 1];
    if (up && dn) d[i] = (p.map[i + 1] - p.map[i - 1]) / (2.0 * h);
    else if (up) d[i] = (p.map[i + 1] - p.map[i]) / h;
    else if (dn) d[i] = (p.map[i] - p.map[i - 1]) / h;
  }
  return d;
}

}  // namespace detail

// Ent_dx of ((1-s) Id + s T)_# m0 on a uniform s-grid, via the Jacobian of
// the interpolated map: psi(s) = psi(0) - int log det((1-s) I + s DT) dm0.
inline GeodesicProfile geodesic_profile(const Measure& m0, const Measure& m1, int s_count = 33) {
  require(s_count >= 33, "geodesic_profile: need at least 33 s-nodes");
  GeodesicProfile prof;
  prof.plan = brenier_transport(m0, m1);
  prof.dim = m0.base_dim();
  const double ent0 = entropy_dx(m0);
  prof.s.resize(s_count);
  prof.psi.resize(s_count);

  if (const auto* ap = prof.plan.affine()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(ap->A);
    require(es.info() == Eigen::Success, "geodesic_profile: eigensolve failed");
    for (int k = 0; k < s_count; ++k) {
      const double s = static_cast<double>(k) / (s_count - 1);
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = (1.0 - s) + s * es.eigenvalues()[i];
        require(lam > 0.0, "geodesic_profile: interpolated Jacobian not positive");
        logdet += std::log(lam);
      }
      prof.s[k] = s;
      prof.psi[k] = ent0 - logdet;
    }
    return prof;
  }

  const auto* mp = prof.plan.monotone();
  require(mp, "geodesic_profile: unsupported transport plan");
  const std::vector<double> w0 = grid_masses(m0, mp->grid);
  const auto deriv = detail::map_derivative(*mp);
  for (int k = 0; k < s_count; ++k) {
    const double s = static_cast<double>(k) / (s_count - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < deriv.size(); ++i) {
      if (!mp->mask[i]) continue;
      const double jac = (1.0 - s) + s * deriv[i];
      require(jac > 0.0, "geodesic_profile: interpolated Jacobian not positive at a node");
      acc += w0[i] * std::log(jac);
    }
    prof.s[k] = s;
    prof.psi[k] = ent0 - acc;
  }
  return prof;
}

}  // namespace ineqlab
