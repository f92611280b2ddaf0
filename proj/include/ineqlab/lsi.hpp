#pragma once

// Dimensional logarithmic Sobolev evaluations in five forms, plus the
// homogeneous Lebesgue-reference form.

#include "ineqlab/deficits.hpp"
#include "ineqlab/evaluation.hpp"
#include "ineqlab/functionals.hpp"
#include "ineqlab/legendre.hpp"
#include "ineqlab/wasserstein.hpp"

namespace ineqlab {

enum class LsiVariant { gaussian_bl, gamma2_s, lp_homogeneous, transport_defLSI, combined };

namespace detail {

// min over s > 0 of a strictly convex objective, by golden section on log s.
template <typename F>
inline std::pair<double, double> minimize_log_golden(F&& f, double lo = -10.0, double hi = 10.0,
                                                     double tol = 1e-10) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(std::exp(d));
    }
  }
  const double s = std::exp(0.5 * (a + b));
  return {s, f(s)};
}

}  // namespace detail

// H(nu|gamma) against the second-moment refinement of the Gaussian
// logarithmic Sobolev inequality.
inline InequalityEvaluation lsi_gaussian_moment(const Measure& nu, const Measure& mu) {
  require(detail::is_standard_gaussian(mu), "lsi gaussian_bl: reference must be the standard Gaussian");
  InequalityEvaluation ev;
  ev.id = "lsi.gaussian_bl";
  const int n = nu.dim();
  const double h = relative_entropy(nu, mu);
  const double i = fisher_information(nu, mu);
  const double m2 = second_moment(nu);
  const double arg = 1.0 + (i + n - m2) / n;
  require(arg > 0.0, "lsi gaussian_bl: logarithm argument must be positive");
  ev.lhs = h;
  ev.rhs = 0.5 * m2 - 0.5 * n + 0.5 * n * std::log(arg);
  ev.intermediates["entropy"] = h;
  ev.intermediates["fisher"] = i;
  ev.intermediates["second_moment"] = m2;
  ev.intermediates["log_argument"] = arg;
  ev.intermediates["rhs_classical"] = 0.5 * i;
  ev.intermediates["slack_classical"] = 0.5 * i - h;
  ev.intermediates["slack_vs_classical"] = 0.5 * i - ev.rhs;
  return ev;
}

// Ent_mu(e^f) against n(s-1-log s) + (1/2R) int |(1-s) grad V + s grad f|^2 dnu,
// minimized over s > 0.
inline InequalityEvaluation lsi_scale_optimized(const Measure& nu, const Measure& mu) {
  InequalityEvaluation ev;
  ev.id = "lsi.gamma2_s";
  const double R = detail::require_convexity_lower(mu, "lsi gamma2_s");
  const int n = nu.dim();
  const int k = nu.factors;
  require(mu.factors == k, "lsi gamma2_s: tensor factors must match");
  Measure nub = nu, mub = mu;
  nub.factors = mub.factors = 1;
  const auto pg = detail::pair_gradient_integrals(nub, mub);
  const double a = k * pg.a, b = k * pg.b, c = k * pg.c;
  const double h = relative_entropy(nu, mu);
  const auto objective = [&](double s) {
    return n * (s - 1.0 - std::log(s)) +
           (sqr(1.0 - s) * a + 2.0 * s * (1.0 - s) * b + s * s * c) / (2.0 * R);
  };
  auto [s_star, val] = detail::minimize_log_golden(objective);
  const double at_one = objective(1.0);
  if (at_one < val) {
    s_star = 1.0;
    val = at_one;
  }
  ev.lhs = h;
  ev.rhs = val;
  ev.intermediates["entropy"] = h;
  ev.intermediates["s_star"] = s_star;
  ev.intermediates["grad_v_squared"] = a;
  ev.intermediates["grad_cross"] = b;
  ev.intermediates["fisher"] = c;
  ev.intermediates["rhs_classical"] = at_one;
  ev.intermediates["slack_classical"] = at_one - h;
  return ev;
}

// Homogeneous-potential form: Ent_mu(e^f) against the conjugate-energy bound.
inline InequalityEvaluation lsi_lp_homogeneous(const Measure& nu, const Measure& mu) {
  InequalityEvaluation ev;
  ev.id = "lsi.lp_homogeneous";
  require(nu.factors == 1 && mu.factors == 1, "lsi lp_homogeneous: base measures only");
  require(mu.potential, "lsi lp_homogeneous: reference must carry a potential");
  const Potential& V = *mu.potential;
  require(V.homogeneity_q && *V.homogeneity_q > 1.0,
          "lsi lp_homogeneous: potential must declare homogeneity q > 1");
  const double q = *V.homogeneity_q;
  const double p = q / (q - 1.0);
  const int n = nu.dim();

  std::shared_ptr<LegendreTransform1D> discrete;
  bool boundary = false;
  const auto conj = [&](const Vec& y) -> double {
    if (V.conjugate0) return V.conjugate0(y);
    if (!discrete) {
      require(V.dim == 1, "lsi lp_homogeneous: discrete conjugate fallback is 1D only");
      const GridSpec box = default_legendre_box(1);
      std::vector<double> xs(box.count[0]), vs(box.count[0]);
      for (int i = 0; i < box.count[0]; ++i) {
        xs[i] = box.coord(0, i);
        Vec pt(1);
        pt[0] = xs[i];
        vs[i] = V.value0(pt);
      }
      discrete = std::make_shared<LegendreTransform1D>(std::move(xs), std::move(vs));
    }
    const auto e = discrete->at(y[0]);
    boundary = boundary || e.on_boundary;
    return e.value;
  };

  double T = 0.0;  // int V0*(grad(V0 - f)) dnu
  if (nu.gaussian() && mu.gaussian()) {
    const auto& ga = *nu.gaussian();
    const int nn = ga.dim();
    const Mat P = ga.cov.llt().solve(Mat::Identity(nn, nn));
    const Vec mn = ga.mean;
    // grad f = grad V - P (x - m_nu), so grad(V0 - f) = P (x - m_nu)
    T = integrate(ScalarField{[&](const Vec& x) { return conj(Vec(P * (x - mn))); }, nullptr}, nu);
  } else {
    const auto cg = detail::common_grid(nu, mu);
    const auto mask = detail::support_mask(cg.wnu);
    std::vector<double> logratio(cg.wnu.size(), 0.0);
    for (std::size_t i = 0; i < cg.wnu.size(); ++i) {
      if (!mask[i]) continue;
      require(cg.wmu[i] > 0.0, "lsi lp_homogeneous: nu not absolutely continuous w.r.t. mu");
      logratio[i] = detail::floored_log(cg.wnu[i]) - detail::floored_log(cg.wmu[i]);
    }
    const auto gradf = detail::grid_gradient(cg.grid, logratio, mask);
    for (std::size_t i = 0; i < cg.wnu.size(); ++i) {
      if (!mask[i]) continue;
      const Vec x = cg.grid.node(i);
      T += cg.wnu[i] * conj(Vec(V.grad(x) - gradf[i]));
    }
  }
  require(T > 0.0, "lsi lp_homogeneous: conjugate energy must be positive");

  const double h = relative_entropy(nu, mu);
  const double nuV0 = integrate_potential(V, nu) - V.beta;
  ev.lhs = h;
  ev.rhs = (n / p) * std::log(p / n * T) + n * (1.0 - p) / p + nuV0;
  ev.intermediates["entropy"] = h;
  ev.intermediates["conjugate_energy"] = T;
  ev.intermediates["p"] = p;
  ev.intermediates["q"] = q;
  ev.intermediates["nu_v0"] = nuV0;
  if (boundary) ev.flags.push_back("legendre_boundary");
  return ev;
}

// Transport form: H against nu(V) - mu(V) + n log(1 + (I/(2R) - nu(V) + mu(V))/n),
// with both deficit branches recorded.
inline InequalityEvaluation lsi_transport(const Measure& nu, const Measure& mu) {
  InequalityEvaluation ev;
  ev.id = "lsi.transport_defLSI";
  const double R = detail::require_convexity_lower(mu, "lsi transport");
  require(mu.potential, "lsi transport: reference must carry a potential");
  const int n = nu.dim();
  const double h = relative_entropy(nu, mu);
  const double i = fisher_information(nu, mu);
  const double D = integrate_potential(*mu.potential, nu) - integrate_potential(*mu.potential, mu);
  const double u = i / (2.0 * R) - D;
  require(u > -static_cast<double>(n), "lsi transport: logarithm argument must be positive");
  ev.lhs = h;
  ev.rhs = D + n * std::log1p(u / n);
  const double delta_lsi = 0.5 * i - R * h;
  ev.intermediates["entropy"] = h;
  ev.intermediates["fisher"] = i;
  ev.intermediates["potential_gap"] = D;
  ev.intermediates["delta_lsi"] = delta_lsi;
  ev.intermediates["branch_delta"] = R * deficit_delta(n, D - h);
  ev.intermediates["branch_lambda"] = R * deficit_lambda(n, u);
  ev.intermediates["slack_branch_delta"] = delta_lsi - R * deficit_delta(n, D - h);
  ev.intermediates["slack_branch_lambda"] = delta_lsi - R * deficit_lambda(n, u);
  return ev;
}

// Combined transport-entropy lower bound on the log-Sobolev deficit.
inline InequalityEvaluation lsi_combined(const Measure& nu, const Measure& mu) {
  InequalityEvaluation ev;
  ev.id = "lsi.combined";
  const double R = detail::require_convexity_lower(mu, "lsi combined");
  require(mu.potential, "lsi combined: reference must carry a potential");
  const int n = nu.dim();
  const double h = relative_entropy(nu, mu);
  const double i = fisher_information(nu, mu);
  const double D = integrate_potential(*mu.potential, nu) - integrate_potential(*mu.potential, mu);
  const double w2sq = wasserstein2_squared(nu, mu);
  const double h0 = h - D;  // H + mu(V) - nu(V)
  double lower = R * deficit_delta(n, -h0);
  if (w2sq > 1e-14) {
    lower += 0.5 * sqr(deficit_delta(n, h0) + deficit_delta(n, -h0)) / w2sq;
  } else {
    ev.flags.push_back("degenerate_w2");
  }
  ev.lhs = lower;
  ev.rhs = 0.5 * i - R * h;
  ev.intermediates["entropy"] = h;
  ev.intermediates["fisher"] = i;
  ev.intermediates["w2_squared"] = w2sq;
  ev.intermediates["h_shifted"] = h0;
  return ev;
}

inline InequalityEvaluation evaluate_lsi_dimensional(const Measure& nu, const Measure& mu,
                                                     LsiVariant variant,
                                                     double tol_override = -1.0) {
  NumericsMeta meta;
  meta.absorb(nu);
  meta.absorb(mu);
  InequalityEvaluation ev;
  switch (variant) {
    case LsiVariant::gaussian_bl: ev = lsi_gaussian_moment(nu, mu); break;
    case LsiVariant::gamma2_s: ev = lsi_scale_optimized(nu, mu); break;
    case LsiVariant::lp_homogeneous: ev = lsi_lp_homogeneous(nu, mu); break;
    case LsiVariant::transport_defLSI: ev = lsi_transport(nu, mu); break;
    case LsiVariant::combined: ev = lsi_combined(nu, mu); break;
  }
  ev.finalize(meta, tol_override);
  return ev;
}

// Lebesgue-reference logarithmic Sobolev inequality with homogeneous cost C:
//   Ent_dx(e^f) <= (n/p) log( p/(n e^{p-1}) int C*(-grad f) e^f dx / (int e^{-C})^{p/n} ).
inline InequalityEvaluation evaluate_lp_euclidean_lsi(const Measure& nu, const Potential& C,
                                                      double tol_override = -1.0) {
  NumericsMeta meta;
  meta.absorb(nu);
  InequalityEvaluation ev;
  ev.id = "lsi.lp_euclidean";
  require(nu.factors == 1, "lp_euclidean: base measures only");
  require(C.homogeneity_q && *C.homogeneity_q > 1.0, "lp_euclidean: cost must declare homogeneity q > 1");
  require(C.dim == nu.base_dim(), "lp_euclidean: dimension mismatch");
  const double q = *C.homogeneity_q;
  const double p = q / (q - 1.0);
  const int n = nu.dim();

  bool boundary = false;
  std::shared_ptr<LegendreTransform1D> discrete;
  const auto conj = [&](const Vec& y) -> double {
    if (C.conjugate0) return C.conjugate0(y);
    if (!discrete) {
      require(C.dim == 1, "lp_euclidean: discrete conjugate fallback is 1D only");
      const GridSpec box = default_legendre_box(1);
      std::vector<double> xs(box.count[0]), vs(box.count[0]);
      for (int i = 0; i < box.count[0]; ++i) {
        xs[i] = box.coord(0, i);
        Vec pt(1);
        pt[0] = xs[i];
        vs[i] = C.value0(pt);
      }
      discrete = std::make_shared<LegendreTransform1D>(std::move(xs), std::move(vs));
    }
    const auto e = discrete->at(y[0]);
    boundary = boundary || e.on_boundary;
    return e.value;
  };

  double T = 0.0;  // int C*(-grad f) dnu, f = log density of nu
  if (const auto* ga = nu.gaussian()) {
    const int nn = ga->dim();
    const Mat P = ga->cov.llt().solve(Mat::Identity(nn, nn));
    const Vec mn = ga->mean;
    T = integrate(ScalarField{[&](const Vec& x) { return conj(Vec(P * (x - mn))); }, nullptr}, nu);
  } else {
    const auto* gd = nu.grid();
    require(gd, "lp_euclidean: Gaussian or grid measures only");
    const auto mask = detail::support_mask(gd->w);
    std::vector<double> logw(gd->w.size(), 0.0);
    for (std::size_t i = 0; i < gd->w.size(); ++i)
      if (mask[i]) logw[i] = detail::floored_log(gd->w[i]);
    const auto grad = detail::grid_gradient(gd->grid, logw, mask);
    for (std::size_t i = 0; i < gd->w.size(); ++i)
      if (mask[i]) T += gd->w[i] * conj(Vec(-grad[i]));
  }
  require(T > 0.0, "lp_euclidean: conjugate energy must be positive");

  ev.lhs = entropy_dx(nu);
  ev.rhs = (n / p) * (std::log(p / n * T) - (p - 1.0)) - C.beta;
  // (int e^{-C0} dx)^{p/n} contributes -(p/n) beta_C inside the log, i.e. -beta_C overall
  ev.intermediates["entropy_dx"] = ev.lhs;
  ev.intermediates["conjugate_energy"] = T;
  ev.intermediates["p"] = p;
  ev.intermediates["log_partition_cost"] = C.beta;
  if (boundary) ev.flags.push_back("legendre_boundary");
  ev.finalize(meta, tol_override);
  return ev;
}

}  // namespace ineqlab
