#pragma once

// Dimensional Talagrand transport inequality and the dimensional HWI
// interpolation inequality.

#include "ineqlab/deficits.hpp"
#include "ineqlab/evaluation.hpp"
#include "ineqlab/functionals.hpp"
#include "ineqlab/lsi.hpp"
#include "ineqlab/wasserstein.hpp"

namespace ineqlab {

// (R/2) W2(nu,mu)^2 <= nu(V) - mu(V) + n - n exp[(nu(V) - mu(V) - H)/n],
// with the equivalent deficit branches recorded as extra slack checks.
inline InequalityEvaluation evaluate_talagrand_dimensional(const Measure& nu, const Measure& mu,
                                                           double tol_override = -1.0) {
  NumericsMeta meta;
  meta.absorb(nu);
  meta.absorb(mu);
  InequalityEvaluation ev;
  ev.id = "talagrand.dimensional";
  const double R = detail::require_convexity_lower(mu, "talagrand");
  require(mu.potential, "talagrand: reference must carry a potential");
  const int n = nu.dim();
  const double h = relative_entropy(nu, mu);
  const double w2sq = wasserstein2_squared(nu, mu);
  const double D = integrate_potential(*mu.potential, nu) - integrate_potential(*mu.potential, mu);

  ev.lhs = 0.5 * R * w2sq;
  ev.rhs = D + n - n * std::exp((D - h) / n);
  const double delta_tal = h - 0.5 * R * w2sq;
  ev.intermediates["entropy"] = h;
  ev.intermediates["w2_squared"] = w2sq;
  ev.intermediates["potential_gap"] = D;
  ev.intermediates["delta_talagrand"] = delta_tal;
  // rhs <= H for every nu, mu (the dimensional bound refines the classical one)
  ev.intermediates["slack_classical"] = h - ev.rhs;
  ev.intermediates["slack_branch_delta"] = delta_tal - deficit_delta(n, h - D);
  const double lam_arg = D - 0.5 * R * w2sq;
  if (lam_arg > -static_cast<double>(n)) {
    ev.intermediates["slack_branch_lambda"] = delta_tal - deficit_lambda(n, lam_arg);
  } else {
    ev.flags.push_back("lambda_branch_out_of_domain");
  }
  if (D <= 0.0) {
    // nu(V) <= mu(V): the deficit dominates the entropy deficit function
    ev.intermediates["slack_centered"] = delta_tal - deficit_delta(n, h);
    ev.intermediates["slack_centered_floor"] =
        deficit_delta(n, h) - std::exp(-1.0) * std::min(h, h * h / n);
  }
  ev.finalize(meta, tol_override);
  return ev;
}

// Dimensional HWI: for densities f, g with respect to mu = e^{-V},
//   n exp[(H_f - H_g + nu_g(V) - nu_f(V))/n] - n
//     <= nu_g(V) - nu_f(V) + W2(f mu, g mu) sqrt(I(f mu | mu)) - (R/2) W2^2.
inline InequalityEvaluation evaluate_hwi(const Measure& nu_f, const Measure& nu_g, const Measure& mu,
                                         bool g_is_reference, double tol_override = -1.0) {
  NumericsMeta meta;
  meta.absorb(nu_f);
  meta.absorb(nu_g);
  meta.absorb(mu);
  InequalityEvaluation ev;
  ev.id = "hwi.dimensional";
  const double R = detail::require_convexity_lower(mu, "hwi");
  require(mu.potential, "hwi: reference must carry a potential");
  const int n = nu_f.dim();
  require(nu_g.dim() == n && mu.dim() == n, "hwi: dimension mismatch");

  const double hf = relative_entropy(nu_f, mu);
  const double hg = g_is_reference ? 0.0 : relative_entropy(nu_g, mu);
  const double i_f = fisher_information(nu_f, mu);
  const double w2sq = wasserstein2_squared(nu_f, nu_g);
  const double w2 = std::sqrt(std::max(0.0, w2sq));
  const double DV = g_is_reference
                        ? integrate_potential(*mu.potential, mu) - integrate_potential(*mu.potential, nu_f)
                        : integrate_potential(*mu.potential, nu_g) -
                              integrate_potential(*mu.potential, nu_f);

  const double u = hf - hg + DV;
  ev.lhs = n * std::expm1(u / n);
  ev.rhs = DV + w2 * std::sqrt(std::max(0.0, i_f)) - 0.5 * R * w2sq;
  ev.intermediates["entropy_f"] = hf;
  ev.intermediates["entropy_g"] = hg;
  ev.intermediates["fisher_f"] = i_f;
  ev.intermediates["w2"] = w2;
  ev.intermediates["potential_gap"] = DV;
  ev.intermediates["exponent"] = u;

  if (g_is_reference && w2sq > 1e-14) {
    // combined lower bound on the log-Sobolev deficit, implied by this case
    const double h0 = hf + DV;  // H + mu(V) - nu_f(V)
    const double lower = R * deficit_delta(n, -h0) +
                         0.5 * sqr(deficit_delta(n, h0) + deficit_delta(n, -h0)) / w2sq;
    const double delta_lsi = 0.5 * i_f - R * hf;
    ev.intermediates["combined_lower"] = lower;
    ev.intermediates["slack_combined"] = delta_lsi - lower;
  }
  ev.finalize(meta, tol_override);
  return ev;
}

inline InequalityEvaluation evaluate_hwi(const Measure& nu_f, const Measure& mu,
                                         double tol_override = -1.0) {
  return evaluate_hwi(nu_f, mu, mu, /*g_is_reference=*/true, tol_override);
}

}  // namespace ineqlab
