#pragma once

// Convexity diagnostics: the nonnegative conjugate-integral functional, the
// trace lower bound along transport, and geodesic convexity of entropy.

#include "ineqlab/evaluation.hpp"
#include "ineqlab/functionals.hpp"
#include "ineqlab/legendre.hpp"
#include "ineqlab/transport.hpp"

namespace ineqlab {

struct ConvexityFunctionalResult {
  double value = 0;             // int W*(g') / g^2 dx with both inputs normalized
  double normalization_g = 0;   // scale making int 1/g = 1
  double normalization_w = 0;   // scale making int 1/W = 1
  bool boundary = false;        // conjugate queried at the sampling boundary
  InequalityEvaluation evaluation;
};

// For positive functions g, W on the line with int 1/g = int 1/W = 1 (enforced
// here by rescaling), evaluates int W*(g'(x)) / g(x)^2 dx, which is >= 0 and
// vanishes when g = W is convex. W is sampled on a box 1.5x wider than the
// integration range so conjugate queries stay interior.
inline ConvexityFunctionalResult check_convexity_functional(
    const std::function<double(double)>& g, const std::function<double(double)>& w, double lo,
    double hi, int points = 8193, double tol_override = 1e-5) {
  require(hi > lo && points >= 9, "convexity functional: need a real interval and >= 9 points");
  const double h = (hi - lo) / (points - 1);

  std::vector<double> gv(points);
  for (int i = 0; i < points; ++i) {
    gv[i] = g(lo + i * h);
    require(gv[i] > 0.0, "convexity functional: g must be positive");
  }
  // trapezoid normalization of 1/g
  double zg = 0.0;
  for (int i = 0; i < points; ++i) zg += (i == 0 || i == points - 1 ? 0.5 : 1.0) * h / gv[i];
  const double cg = zg;  // int 1/(cg*g) = 1
  for (auto& v : gv) v *= cg;

  // integration range: trim where the density 1/g carries < 1e-12 per tail
  std::vector<double> cum(points, 0.0);
  double total = 0.0;
  for (int i = 0; i < points; ++i) {
    total += h / gv[i];
    cum[i] = total;
  }
  int a = 1, b = points - 2;
  while (a < b && cum[a] < 1e-12 * total) ++a;
  while (b > a && total - cum[b] < 1e-12 * total) --b;

  // sample W on a 1.5x wider box and normalize the same way
  const double mid = 0.5 * (lo + hi), half = 0.75 * (hi - lo);
  const int wpoints = points + points / 2;
  const double wh = 2.0 * half / (wpoints - 1);
  std::vector<double> wx(wpoints), wv(wpoints);
  double zw = 0.0;
  for (int i = 0; i < wpoints; ++i) {
    wx[i] = mid - half + i * wh;
    wv[i] = w(wx[i]);
    require(wv[i] > 0.0, "convexity functional: W must be positive");
    if (wx[i] >= lo && wx[i] <= hi) zw += wh / wv[i];
  }
  const double cw = zw;
  for (auto& v : wv) v *= cw;
  LegendreTransform1D conj(wx, wv);

  ConvexityFunctionalResult out;
  out.normalization_g = cg;
  out.normalization_w = cw;
  double value = 0.0;
  for (int i = a; i <= b; ++i) {
    const double gp = (gv[i + 1] - gv[i - 1]) / (2.0 * h);
    const auto e = conj.at(gp);
    out.boundary = out.boundary || e.on_boundary;
    value += h * e.value / sqr(gv[i]);
  }
  out.value = value;

  NumericsMeta meta;
  meta.grid = true;
  meta.h = h;
  out.evaluation.id = "convexity.integral";
  out.evaluation.lhs = 0.0;
  out.evaluation.rhs = value;
  out.evaluation.intermediates["normalization_g"] = cg;
  out.evaluation.intermediates["normalization_w"] = cw;
  if (out.boundary) out.evaluation.flags.push_back("legendre_boundary");
  out.evaluation.finalize(meta, tol_override);
  return out;
}

// n exp[(Ent_dx(source) - Ent_dx(target))/n] <= int (div of the transport map) d(source).
inline InequalityEvaluation check_trace_bound(const Measure& source, const Measure& target,
                                              double tol_override = -1.0) {
  NumericsMeta meta;
  meta.absorb(source);
  meta.absorb(target);
  InequalityEvaluation ev;
  ev.id = "transport.trace";
  const int n = source.dim();
  require(target.dim() == n, "trace bound: dimension mismatch");
  const TransportPlan plan = brenier_transport(source, target);

  double divergence = 0.0;
  if (const auto* ap = plan.affine()) {
    divergence = ap->A.trace();
  } else if (const auto* mp = plan.monotone()) {
    const std::vector<double> w0 = grid_masses(source, mp->grid);
    const std::vector<double> deriv = detail::map_derivative(*mp);
    for (std::size_t i = 0; i < w0.size(); ++i)
      if (mp->mask[i]) divergence += w0[i] * deriv[i];
    meta.grid = true;
    meta.h = std::max(meta.h, mp->grid.max_step());
  } else {
    fail("trace bound: particle couplings are not supported");
  }

  const double e0 = entropy_dx(source);
  const double e1 = entropy_dx(target);
  ev.lhs = n * std::exp((e0 - e1) / n);
  ev.rhs = divergence;
  ev.intermediates["entropy_dx_source"] = e0;
  ev.intermediates["entropy_dx_target"] = e1;
  ev.intermediates["divergence"] = divergence;
  ev.finalize(meta, tol_override);
  return ev;
}

struct GeodesicConvexityResult {
  GeodesicProfile profile;
  double worst_differential = 0;  // min over s of psi'' - psi'^2/n (via exp(-psi/n) concavity)
  double worst_tangent = 0;       // min over pairs of n - psi'(r)(s-r) - n e^{(psi(r)-psi(s))/n}
  double worst_monotone = 0;      // min over pairs of (psi'(s)-psi'(r))(s-r) - 4n sinh^2(...)
  double argmin_differential = 0, argmin_tangent = 0, argmin_monotone = 0;
  InequalityEvaluation evaluation;
};

// Checks the three equivalent forms of dimensional displacement convexity of
// psi(s) = -Ent_dx(geodesic at s). The differential form is evaluated through
// discrete concavity of U = exp(-psi/n), whose second differences keep the
// exact sign for concave U.
inline GeodesicConvexityResult check_geodesic_convexity(const Measure& m0, const Measure& m1,
                                                        int s_count = 33,
                                                        double tol_override = 1e-4) {
  GeodesicConvexityResult out;
  out.profile = geodesic_profile(m0, m1, s_count);
  const auto& s = out.profile.s;
  const auto& psi = out.profile.psi;
  const double n = out.profile.dim;
  const int K = static_cast<int>(s.size());
  const double ds = s[1] - s[0];

  std::vector<double> U(K), dpsi(K, 0.0);
  for (int i = 0; i < K; ++i) U[i] = std::exp(-psi[i] / n);
  for (int i = 1; i + 1 < K; ++i) dpsi[i] = (psi[i + 1] - psi[i - 1]) / (2.0 * ds);

  out.worst_differential = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < K; ++i) {
    const double second = (U[i + 1] - 2.0 * U[i] + U[i - 1]) / sqr(ds);
    const double slack = -second * n / U[i];  // -> psi'' - psi'^2/n
    if (slack < out.worst_differential) {
      out.worst_differential = slack;
      out.argmin_differential = s[i];
    }
  }

  out.worst_tangent = std::numeric_limits<double>::infinity();
  out.worst_monotone = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < K; ++i) {
    for (int j = 0; j < K; ++j) {
      if (j == i) continue;
      const double slack = n - dpsi[i] * (s[j] - s[i]) - n * std::exp((psi[i] - psi[j]) / n);
      if (slack < out.worst_tangent) {
        out.worst_tangent = slack;
        out.argmin_tangent = s[i];
      }
    }
    for (int j = i + 1; j + 1 < K; ++j) {
      const double slack =
          (dpsi[j] - dpsi[i]) * (s[j] - s[i]) - 4.0 * n * sqr(std::sinh((psi[j] - psi[i]) / (2.0 * n)));
      if (slack < out.worst_monotone) {
        out.worst_monotone = slack;
        out.argmin_monotone = s[i];
      }
    }
  }

  NumericsMeta meta;
  meta.grid = true;
  meta.h = ds;
  auto& ev = out.evaluation;
  ev.id = "geodesic.convexity";
  ev.lhs = 0.0;
  ev.rhs = out.worst_differential;
  ev.intermediates["slack_tangent"] = out.worst_tangent;
  ev.intermediates["slack_monotone"] = out.worst_monotone;
  ev.intermediates["argmin_differential"] = out.argmin_differential;
  ev.intermediates["argmin_tangent"] = out.argmin_tangent;
  ev.intermediates["argmin_monotone"] = out.argmin_monotone;
  ev.finalize(meta, tol_override);
  return out;
}

}  // namespace ineqlab
