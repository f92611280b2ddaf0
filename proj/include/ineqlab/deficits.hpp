#pragma once

// Dimensional deficit functions and the two core deficits.

#include "ineqlab/common.hpp"

namespace ineqlab {

// delta_n(x) = n (e^{-x/n} - 1 + x/n), nonnegative, zero only at 0.
inline double deficit_delta(int n, double x) {
  require(n >= 1, "deficit_delta: n must be >= 1");
  const double t = x / n;
  return n * (std::expm1(-t) + t);
}

// Lambda_n(x) = x - n log(1 + x/n) on (-n, inf).
inline double deficit_lambda(int n, double x) {
  require(n >= 1, "deficit_lambda: n must be >= 1");
  require(x > -static_cast<double>(n), "deficit_lambda: argument must exceed -n");
  return x - n * std::log1p(x / n);
}

struct CoreDeficits {
  double lsi;        // I/2 - R H
  double talagrand;  // H - (R/2) W2^2
  double h, i, w2;
};

inline CoreDeficits core_deficits(double h, double i, double w2, double R) {
  require(R > 0.0, "core_deficits: R must be positive");
  require(h >= 0.0 && i >= 0.0 && w2 >= 0.0, "core_deficits: functionals must be nonnegative");
  return CoreDeficits{0.5 * i - R * h, h - 0.5 * R * w2 * w2, h, i, w2};
}

}  // namespace ineqlab
