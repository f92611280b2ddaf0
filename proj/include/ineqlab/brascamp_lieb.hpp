#pragma once

// Variance bounds of Brascamp-Lieb type: the classical inverse-Hessian bound,
// two transport-type strengthenings, and four Gaussian refinements.

#include "ineqlab/evaluation.hpp"
#include "ineqlab/functionals.hpp"
#include "ineqlab/lsi.hpp"

namespace ineqlab {

enum class BLVariant {
  classical,
  transport_I,
  bbl_II,
  gaussian_dim,
  gaussian_spectral,
  harge,
  bobkov_ledoux
};

inline const char* bl_variant_name(BLVariant v) {
  switch (v) {
    case BLVariant::classical: return "bl.classical";
    case BLVariant::transport_I: return "bl.transport_I";
    case BLVariant::bbl_II: return "bl.bbl_II";
    case BLVariant::gaussian_dim: return "bl.gaussian_dim";
    case BLVariant::gaussian_spectral: return "bl.gaussian_spectral";
    case BLVariant::harge: return "bl.harge";
    case BLVariant::bobkov_ledoux: return "bl.bobkov_ledoux";
  }
  fail("unknown Brascamp-Lieb variant");
}

// probabilists' Hermite polynomial He_k and its derivative He_k' = k He_{k-1}
inline double hermite_he(int k, double x) {
  require(k >= 0, "hermite_he: order must be nonnegative");
  double prev = 1.0, cur = x;
  if (k == 0) return prev;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline ScalarField hermite_field(int k) {
  return ScalarField{[k](const Vec& x) { return hermite_he(k, x[0]); },
                     [k](const Vec& x) {
                       Vec g(1);
                       g[0] = k == 0 ? 0.0 : k * hermite_he(k - 1, x[0]);
                       return g;
                     }};
}

// He_k(x) exp(-x^2/4): bounded, so it stays admissible as a density perturbation
inline ScalarField damped_hermite_field(int k) {
  return ScalarField{[k](const Vec& x) { return hermite_he(k, x[0]) * std::exp(-0.25 * sqr(x[0])); },
                     [k](const Vec& x) {
                       const double d = std::exp(-0.25 * sqr(x[0]));
                       Vec g(1);
                       g[0] = ((k == 0 ? 0.0 : k * hermite_he(k - 1, x[0])) -
                               0.5 * x[0] * hermite_he(k, x[0])) *
                              d;
                       return g;
                     }};
}

inline ScalarField polynomial_field(std::vector<double> coeffs) {
  require(!coeffs.empty(), "polynomial_field: need at least one coefficient");
  auto value = [coeffs](const Vec& x) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * x[0] + coeffs[j];
    return acc;
  };
  auto grad = [coeffs](const Vec& x) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) acc = acc * x[0] + j * coeffs[j];
    Vec g(1);
    g[0] = acc;
    return g;
  };
  return ScalarField{std::move(value), std::move(grad)};
}

inline InequalityEvaluation evaluate_brascamp_lieb(const ScalarField& f, const Measure& mu,
                                                   BLVariant variant, double tol_override = -1.0) {
  NumericsMeta meta;
  meta.absorb(mu);
  InequalityEvaluation ev;
  ev.id = bl_variant_name(variant);
  require(mu.factors == 1, "brascamp_lieb: base measures only");
  const int n = mu.dim();

  const bool needs_hessian = variant == BLVariant::classical || variant == BLVariant::transport_I ||
                             variant == BLVariant::bbl_II || variant == BLVariant::harge;
  const bool needs_standard_gaussian = variant == BLVariant::gaussian_dim ||
                                       variant == BLVariant::gaussian_spectral ||
                                       variant == BLVariant::bobkov_ledoux;
  if (needs_hessian) require(mu.potential, "brascamp_lieb: measure must carry a potential");
  if (needs_standard_gaussian)
    require(detail::is_standard_gaussian(mu), "brascamp_lieb: variant requires the standard Gaussian");

  const auto quad = detail::quadrature_of(mu);
  const std::size_t m = quad.w.size();

  // pass 1: means of f and V
  double fbar = 0.0, vbar = 0.0;
  std::vector<double> fv(m, 0.0), vv(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (quad.w[i] <= 0.0) continue;
    fv[i] = f(quad.x[i]);
    if (mu.potential) vv[i] = mu.potential->value(quad.x[i]);
    fbar += quad.w[i] * fv[i];
    vbar += quad.w[i] * vv[i];
  }

  double variance = 0.0, var_v = 0.0, cov_vf = 0.0;
  double energy = 0.0, grad_sq = 0.0;
  double inner_moment = 0.0;        // int (|x|^2 - n) f dmu
  Vec grad_mean = Vec::Zero(n);     // int grad f dmu
  double radial_term = 0.0;         // int (grad f . x)^2 / (n + |x|^2) dmu
  double bbl_correction = 0.0;      // int (f - fbar - X)^2 / (n + Y) dmu

  for (std::size_t i = 0; i < m; ++i) {
    if (quad.w[i] <= 0.0) continue;
    const double w = quad.w[i];
    const Vec& x = quad.x[i];
    const Vec gf = f.grad(x);
    const double fc = fv[i] - fbar;
    variance += w * fc * fc;
    var_v += w * sqr(vv[i] - vbar);
    cov_vf += w * (vv[i] - vbar) * fc;
    grad_sq += w * gf.squaredNorm();
    grad_mean += w * gf;
    inner_moment += w * (x.squaredNorm() - n) * fv[i];
    radial_term += w * sqr(gf.dot(x)) / (n + x.squaredNorm());
    if (needs_hessian) {
      const Mat H = mu.potential->hess(x);
      Eigen::LLT<Mat> llt(H);
      require(llt.info() == Eigen::Success,
              "brascamp_lieb: potential Hessian must be positive definite");
      energy += w * gf.dot(llt.solve(gf));
      if (variant == BLVariant::bbl_II) {
        const Vec gv = mu.potential->grad(x);
        const double X = gf.dot(llt.solve(gv));
        const double Y = gv.dot(llt.solve(gv));
        bbl_correction += w * sqr(fc - X) / (n + Y);
      }
    }
  }

  ev.lhs = variance;
  ev.intermediates["variance"] = variance;
  switch (variant) {
    case BLVariant::classical:
      ev.rhs = energy;
      ev.intermediates["energy"] = energy;
      break;
    case BLVariant::transport_I: {
      ev.rhs = energy;
      ev.intermediates["energy"] = energy;
      ev.intermediates["variance_v"] = var_v;
      ev.intermediates["covariance_vf"] = cov_vf;
      if (var_v < n) {
        ev.rhs -= sqr(cov_vf) / (n - var_v);
        ev.intermediates["correction"] = sqr(cov_vf) / (n - var_v);
      } else {
        ev.flags.push_back("variance_v_not_below_n");
      }
      break;
    }
    case BLVariant::bbl_II:
      ev.rhs = energy - bbl_correction;
      ev.intermediates["energy"] = energy;
      ev.intermediates["correction"] = bbl_correction;
      ev.intermediates["centering_shift"] = fbar;
      break;
    case BLVariant::gaussian_dim:
      ev.rhs = grad_sq - sqr(inner_moment) / (2.0 * n);
      ev.intermediates["energy"] = grad_sq;
      ev.intermediates["correction"] = sqr(inner_moment) / (2.0 * n);
      ev.intermediates["inner_moment"] = inner_moment;
      break;
    case BLVariant::gaussian_spectral:
      ev.rhs = 0.5 * grad_sq + 0.5 * grad_mean.squaredNorm();
      ev.intermediates["energy"] = grad_sq;
      ev.intermediates["gradient_mean_sq"] = grad_mean.squaredNorm();
      break;
    case BLVariant::harge: {
      require(mu.potential->convexity_lower && mu.potential->convexity_upper,
              "bl.harge: potential must declare convexity bounds R and S");
      const double R = *mu.potential->convexity_lower;
      const double S = *mu.potential->convexity_upper;
      require(R >= 0.0 && S >= R && S > 0.0, "bl.harge: need 0 <= R <= S");
      ev.rhs = energy - (1.0 + R / S) / n * sqr(cov_vf);
      ev.intermediates["energy"] = energy;
      ev.intermediates["correction"] = (1.0 + R / S) / n * sqr(cov_vf);
      ev.intermediates["covariance_vf"] = cov_vf;
      break;
    }
    case BLVariant::bobkov_ledoux:
      ev.rhs = 6.0 * grad_sq - 6.0 * radial_term;
      ev.intermediates["energy"] = grad_sq;
      ev.intermediates["radial_term"] = radial_term;
      break;
  }
  ev.finalize(meta, tol_override);
  return ev;
}

}  // namespace ineqlab
