#pragma once

// Potentials V = V0 + beta with e^{-V} a probability density, plus the
// built-in registry (gaussian, quartic, gaussian plus power, tabulated).

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ineqlab/common.hpp"

namespace ineqlab {

struct Potential {
  // V0 = 0.5 (x-center)' Q (x-center) + constant
  struct Quadratic {
    Mat Q;
    Vec center;
    double constant = 0.0;
  };

  int dim = 1;
  std::string id;
  std::function<double(const Vec&)> value0;  // unnormalized part
  double beta = 0.0;                         // V = V0 + beta, int e^{-V} dx = 1
  std::function<Vec(const Vec&)> gradient;   // of V (= of V0); optional
  std::function<Mat(const Vec&)> hessian;    // optional
  std::function<double(const Vec&)> conjugate0;  // Legendre conjugate of V0; optional

  std::optional<double> convexity_lower;  // R with Hess V >= R Id
  std::optional<double> convexity_upper;  // S with Hess V <= S Id
  std::optional<double> homogeneity_q;    // V0(t x) = t^q V0(x)
  bool doubling = false;                  // declared only, never checked
  std::optional<Quadratic> quadratic;

  double value(const Vec& x) const { return value0(x) + beta; }

  Vec grad(const Vec& x) const {
    if (gradient) return gradient(x);
    Vec g(dim);
    Vec xp = x, xm = x;
    for (int k = 0; k < dim; ++k) {
      const double h = fd_step(x[k]);
      xp[k] = x[k] + h;
      xm[k] = x[k] - h;
      g[k] = (value0(xp) - value0(xm)) / (2.0 * h);
      xp[k] = x[k];
      xm[k] = x[k];
    }
    return g;
  }

  Mat hess(const Vec& x) const {
    if (hessian) return hessian(x);
    Mat H(dim, dim);
    if (gradient) {
      Vec xp = x, xm = x;
      for (int k = 0; k < dim; ++k) {
        const double h = fd_step(x[k]);
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        H.col(k) = (gradient(xp) - gradient(xm)) / (2.0 * h);
        xp[k] = x[k];
        xm[k] = x[k];
      }
      return Mat(0.5 * (H + H.transpose()));
    }
    const double v0 = value0(x);
    Vec y = x;
    for (int j = 0; j < dim; ++j) {
      const double hj = fd_step(x[j]);
      y[j] = x[j] + hj;
      const double vp = value0(y);
      y[j] = x[j] - hj;
      const double vm = value0(y);
      y[j] = x[j];
      H(j, j) = (vp - 2.0 * v0 + vm) / (hj * hj);
      for (int k = j + 1; k < dim; ++k) {
        const double hk = fd_step(x[k]);
        double s = 0.0;
        for (int sj : {1, -1}) {
          for (int sk : {1, -1}) {
            y[j] = x[j] + sj * hj;
            y[k] = x[k] + sk * hk;
            s += sj * sk * value0(y);
          }
        }
        y[j] = x[j];
        y[k] = x[k];
        H(j, k) = H(k, j) = s / (4.0 * hj * hk);
      }
    }
    return H;
  }
};

struct PotentialEval {
  double value;
  Vec gradient;
  Mat hessian;
};

inline PotentialEval potential_eval(const Potential& p, const Vec& x) {
  require(x.size() == p.dim, "potential_eval: point dimension mismatch");
  return PotentialEval{p.value(x), p.grad(x), p.hess(x)};
}

// Conjugate of c |x|^q is cc |y|^p with 1/p + 1/q = 1.
inline double power_conjugate_coeff(double c, double q) {
  const double p = q / (q - 1.0);
  return std::pow(c * q, -p / q) / p;
}

inline Potential make_gaussian_potential(const Vec& mean, const Mat& cov) {
  const int n = static_cast<int>(mean.size());
  require(cov.rows() == n && cov.cols() == n, "gaussian potential: covariance shape mismatch");
  Eigen::LLT<Mat> llt(cov);
  require(llt.info() == Eigen::Success, "gaussian potential: covariance not positive definite");
  Mat Q = llt.solve(Mat::Identity(n, n));
  Q = 0.5 * (Q + Q.transpose());
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));

  Potential p;
  p.dim = n;
  p.id = "gaussian";
  p.value0 = [Q, mean](const Vec& x) {
    Vec d = x - mean;
    return 0.5 * d.dot(Q * d);
  };
  p.beta = 0.5 * (n * std::log(2.0 * M_PI) + logdet);
  p.gradient = [Q, mean](const Vec& x) { return Vec(Q * (x - mean)); };
  p.hessian = [Q](const Vec&) { return Q; };
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  p.convexity_lower = 1.0 / es.eigenvalues().maxCoeff();
  p.convexity_upper = 1.0 / es.eigenvalues().minCoeff();
  p.quadratic = Potential::Quadratic{Q, mean, 0.0};
  if (mean.isZero(0.0)) {
    p.homogeneity_q = 2.0;
    const Mat S = cov;
    p.conjugate0 = [S](const Vec& y) { return 0.5 * y.dot(S * y); };
  }
  return p;
}

inline Potential make_gaussian_potential(int dim) {
  return make_gaussian_potential(Vec::Zero(dim), Mat::Identity(dim, dim));
}

// V0 = x^4 on the line.
inline Potential make_quartic_potential() {
  Potential p;
  p.dim = 1;
  p.id = "quartic";
  p.value0 = [](const Vec& x) { return sqr(sqr(x[0])); };
  p.beta = std::log(std::tgamma(0.25) / 2.0);  // log int e^{-x^4} dx
  p.gradient = [](const Vec& x) {
    Vec g(1);
    g[0] = 4.0 * x[0] * x[0] * x[0];
    return g;
  };
  p.hessian = [](const Vec& x) {
    Mat h(1, 1);
    h(0, 0) = 12.0 * x[0] * x[0];
    return h;
  };
  p.convexity_lower = 0.0;
  p.homogeneity_q = 4.0;
  const double cc = power_conjugate_coeff(1.0, 4.0);
  p.conjugate0 = [cc](const Vec& y) { return cc * std::pow(std::abs(y[0]), 4.0 / 3.0); };
  return p;
}

namespace detail {

// log of int_R^dim e^{-|x|^2/2 - |x|^p} dx by radial quadrature.
inline double log_power_partition(int dim, double p) {
  const double L = 12.0;
  const int n = 24000;
  const double h = L / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double f = std::exp(-0.5 * r * r - std::pow(r, p));
    const double ring = (dim == 1) ? 2.0 : 2.0 * M_PI * r;
    s += (i == 0 || i == n ? 0.5 : 1.0) * ring * f;
  }
  return std::log(s * h);
}

}  // namespace detail

// V0 = |x|^2/2 + |x|^p, uniformly convex with R = 1 for p >= 2.
inline Potential make_gaussian_plus_power_potential(int dim, double p) {
  require(dim >= 1 && dim <= 2, "gaussian_plus_power supports dim 1 or 2");
  require(p >= 2.0, "gaussian_plus_power requires p >= 2");
  Potential pot;
  pot.dim = dim;
  pot.id = "gaussian_plus_power";
  pot.value0 = [p](const Vec& x) {
    const double r = x.norm();
    return 0.5 * r * r + std::pow(r, p);
  };
  pot.beta = detail::log_power_partition(dim, p);
  pot.gradient = [p](const Vec& x) {
    const double r = x.norm();
    const double fac = (r == 0.0) ? 0.0 : p * std::pow(r, p - 2.0);
    return Vec(x + fac * x);
  };
  pot.hessian = [p, dim](const Vec& x) {
    const double r = x.norm();
    Mat h = Mat::Identity(dim, dim);
    if (r > 0.0) {
      const Vec u = x / r;
      h += p * std::pow(r, p - 2.0) * (Mat::Identity(dim, dim) + (p - 2.0) * u * u.transpose());
    } else if (p == 2.0) {
      h += 2.0 * Mat::Identity(dim, dim);
    }
    return h;
  };
  pot.convexity_lower = 1.0;
  return pot;
}

// V0 = c2 x^2/2 + c4 x^4 on the line: uniformly convex with R = c2 when c4 >= 0.
inline Potential make_quadratic_quartic_potential(double c2, double c4) {
  require(c2 > 0.0 && c4 >= 0.0, "quadratic_quartic requires c2 > 0 and c4 >= 0");
  Potential p;
  p.dim = 1;
  p.id = "quadratic_quartic";
  p.value0 = [c2, c4](const Vec& x) { return 0.5 * c2 * sqr(x[0]) + c4 * sqr(sqr(x[0])); };
  p.gradient = [c2, c4](const Vec& x) {
    Vec g(1);
    g[0] = c2 * x[0] + 4.0 * c4 * x[0] * x[0] * x[0];
    return g;
  };
  p.hessian = [c2, c4](const Vec& x) {
    Mat h(1, 1);
    h(0, 0) = c2 + 12.0 * c4 * sqr(x[0]);
    return h;
  };
  p.convexity_lower = c2;
  // log partition by trapezoid out to where the density underflows
  double L = std::sqrt(1400.0 / c2);
  if (c4 > 0.0) L = std::min(L, std::pow(1400.0 / c4, 0.25));
  L += 1.0;
  const int nn = std::max(20001, static_cast<int>(L / 0.002) | 1);
  const double h = 2.0 * L / (nn - 1);
  double s = 0.0;
  for (int i = 0; i < nn; ++i) {
    const double x = -L + i * h;
    s += (i == 0 || i == nn - 1 ? 0.5 : 1.0) * std::exp(-0.5 * c2 * x * x - c4 * x * x * x * x);
  }
  p.beta = std::log(s * h);
  return p;
}

// Values tabulated on a uniform 1D grid, interpolated by local quadratics.
inline Potential make_tabulated_potential(std::vector<double> x, std::vector<double> v,
                                          std::optional<double> R = std::nullopt,
                                          std::optional<double> S = std::nullopt) {
  require(x.size() == v.size() && x.size() >= 3, "tabulated potential needs >= 3 samples");
  const double h = x[1] - x[0];
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    require(std::abs((x[i + 1] - x[i]) - h) < 1e-9 * std::abs(h), "tabulated potential: grid must be uniform");
  }
  const double x0 = x[0];
  const int n = static_cast<int>(x.size());
  auto table = std::make_shared<std::vector<double>>(std::move(v));
  Potential p;
  p.dim = 1;
  p.id = "tabulated";
  p.value0 = [table, x0, h, n](const Vec& q) {
    const double t = (q[0] - x0) / h;
    require(t >= -1e-9 && t <= n - 1 + 1e-9, "tabulated potential: query outside table");
    int i = static_cast<int>(std::lround(t));
    i = std::max(1, std::min(n - 2, i));
    const double d = t - i;
    const auto& tv = *table;
    return tv[i] + 0.5 * d * (tv[i + 1] - tv[i - 1]) + 0.5 * d * d * (tv[i + 1] - 2.0 * tv[i] + tv[i - 1]);
  };
  p.convexity_lower = R;
  p.convexity_upper = S;
  return p;
}

}  // namespace ineqlab
