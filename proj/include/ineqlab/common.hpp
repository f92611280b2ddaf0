#pragma once

// Shared error type, pinned numeric policies and small helpers.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace ineqlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

template <typename Cond>
inline void require(const Cond& cond, const std::string& msg) {
  if (!static_cast<bool>(cond)) fail(msg);
}

// Maximum relative mass a potential-built grid may discard outside its box.
inline constexpr double kTailEpsilon = 1e-9;

// Densities are floored here before logarithms are taken.
inline constexpr double kDensityFloor = 1e-300;

// Cells below this fraction of the max weight are excluded from gradient
// quadratures (Fisher information and friends).
inline constexpr double kSupportCut = 1e-15;

// Central-difference step for derivative fallbacks.
inline double fd_step(double x) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * (1.0 + std::abs(x));
}

// Scalar test function with optional analytic gradient; falls back to
// central differences when only the value is supplied.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;

  double operator()(const Vec& x) const { return value(x); }

  Vec grad(const Vec& x) const {
    if (gradient) return gradient(x);
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (int k = 0; k < x.size(); ++k) {
      const double h = fd_step(x[k]);
      xp[k] = x[k] + h;
      xm[k] = x[k] - h;
      g[k] = (value(xp) - value(xm)) / (2.0 * h);
      xp[k] = x[k];
      xm[k] = x[k];
    }
    return g;
  }
};

inline ScalarField field_linear(const Vec& a) {
  return ScalarField{[a](const Vec& x) { return a.dot(x); },
                     [a](const Vec&) { return a; }};
}

inline ScalarField field_norm_squared() {
  return ScalarField{[](const Vec& x) { return x.squaredNorm(); },
                     [](const Vec& x) { return Vec(2.0 * x); }};
}

inline double sqr(double x) { return x * x; }

}  // namespace ineqlab
